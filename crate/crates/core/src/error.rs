use crate::raster::Rect;

/// Errors produced by the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("rect {rect:?} out of bounds for a {width}x{height} image")]
    RectOutOfBounds {
        rect: Rect,
        width: usize,
        height: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("extraction failed at stage `{stage}`: {reason}")]
    Extraction { stage: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn extraction(stage: &'static str, reason: impl Into<String>) -> Self {
        Error::Extraction {
            stage,
            reason: reason.into(),
        }
    }

    /// Name of the pipeline stage that failed, when this is an extraction error.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Extraction { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
