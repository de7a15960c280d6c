use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("document {id:?} rejected: {reason}")]
    Rejected { id: String, reason: String },

    #[error("shape mismatch in {op}: expected {expected}, got {actual}")]
    Shape {
        op: &'static str,
        expected: String,
        actual: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("hypergraph invariant violated: {0}")]
    Graph(String),

    #[error("autodiff: {0}")]
    Autodiff(&'static str),

    #[error("non-finite loss at epoch {epoch}, document {doc_id:?}")]
    NonFinite { epoch: usize, doc_id: String },
}

impl Error {
    pub(crate) fn shape(
        op: &'static str,
        expected: impl core::fmt::Display,
        actual: impl core::fmt::Display,
    ) -> Self {
        use alloc::string::ToString;
        Error::Shape {
            op,
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}
