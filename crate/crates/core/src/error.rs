use crate::array::Topology;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
    #[error("block index {index} out of range ({blocks} blocks)")]
    BlockOutOfRange { index: usize, blocks: usize },
    #[error("cell ({row}, {col}) out of range for a {rows}x{cols} array")]
    CellOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("block {0} must be erased before programming")]
    BlockNotErased(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("read voltages violate the {0:?} ordering constraint")]
    BiasOrdering(Topology),
    #[error("rows {start}..{end} span more than one erase block of {block_rows} rows")]
    SpansBlocks {
        start: usize,
        end: usize,
        block_rows: usize,
    },
    #[error("phases must be 1 or 2, got {0}")]
    InvalidPhases(usize),
    #[error("key store does not cover the array address space")]
    KeyShape,
    #[error("at least one {0} is required")]
    Empty(&'static str),
}
