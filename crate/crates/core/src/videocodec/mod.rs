//! Intra-only block coder with nine directional predictors, in which the
//! masked residual coefficients of every block are predicted hierarchically
//! by TV descent before their errors are coded.

mod codec;
mod intra;
mod masks;
mod y4m_io;

pub use codec::{
    block_size_for_width, decode_sequence, encode_frame, encode_sequence, vcrespred_decode_block, vcrespred_encode_block, BlockTools,
    DecodedSequence, EncodedBlock, FrameResult, FrameStats, PredictionStep, SymbolCostMap, SyncProof, VideoCodecConfig,
};
pub use intra::{choose_mode, intra_predict, sad, IntraMode, Neighbors};
pub use masks::{ModeEntry, ModeMaskTable};
pub use y4m_io::{read_y4m, read_y4m_file, write_y4m, write_y4m_file, LumaSequence};
