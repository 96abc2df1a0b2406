//! Metrics, rate-distortion sweeps, symbol-cost map rendering and run
//! manifests.

mod corpus;
mod costmap;
mod metrics;
mod rd;

pub use corpus::{check_inputs, label_of, load_pgm_corpus, panning_sequence};
pub use costmap::{costmap_from_csv, costmap_pgm, costmap_svg, costmap_to_csv, NEUTRAL_GRAY};
pub use metrics::{bd_rate, mse, psnr, psnr_db, Psnr, RDCurve, RDPoint};
pub use rd::{gain_svg, rd_sweep, write_sweep_outputs, BdRow, GainRow, RdRow, RunManifest, SourceKind, SweepReport};
