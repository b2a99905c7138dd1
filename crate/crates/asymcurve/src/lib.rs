//! Construction and numeric analysis of a family of planar curves built by
//! iterated bump refinement.
//!
//! The construction starts from a single smooth bump over a dyadic interval
//! and repeatedly embeds smaller bumps onto every convex piece, with the
//! bump height growing relative to the piece scale. Gluing the blocks for
//! every dyadic scale and closing the figure yields a Jordan curve that is
//! chord-arc and asymptotically conformal yet nowhere asymptotically
//! smooth: zooming in anywhere keeps revealing fresh wiggles of
//! non-vanishing relative size.
//!
//! The crate has three layers:
//!
//! * geometry: [`Point`], [`SampledCurve`], discrete Frenet data and
//!   curvature profiles;
//! * construction: [`build_gamma_n`] for one dyadic block's refinement
//!   tower, [`assemble_gamma`] for the closed curve;
//! * analysis: chord-arc and conformality ratios, pair scans, the
//!   smoothness-modulus ladder, uniform approximability, and [`classify`],
//!   which bundles everything into one report.
//!
//! Everything is deterministic: scans that subsample use a seeded generator
//! and identical inputs reproduce reports bit for bit.

pub mod bump;
pub mod construction;
pub mod curve;
pub mod error;
pub mod frenet;
pub mod functionals;
pub mod io;
pub mod point;

pub use bump::{embed_bump, embedded_speed, partition_equal, BumpProfile, PartitionSpec, Side};
pub use construction::{
    assemble_gamma, build_gamma_n, build_level1, level_params, refine_level, AssembleRecord,
    BlockSpan, BuildManifest, BuildOptions, CurveStack, Junction, LevelParams, ParamMap,
    PieceRecord, RefineRecord, SubarcPlan,
};
pub use curve::{SampledCurve, SubarcRef};
pub use error::{Error, Result};
pub use frenet::{
    curvature_profile, default_kappa_tol, frenet_frame, inflection_points, menger_curvature,
    CurvatureProfile, FrenetSample,
};
pub use functionals::{
    chordarc_ratio, classify, conformality_ratio, equal_partition_ratio, scan_collect, scan_sup,
    smoothness_ladder, smoothness_modulus, ua_dp, ua_equal, uniform_approx_n, ChordArcSummary,
    ClassificationReport, ClassifyConfig, ConsistencyFlags, LadderRow, PairMetric, PairSample,
    PairScanConfig, ScanResult, UaEntry, UaMode, UaOutcome,
};
pub use io::{read_curve_csv, write_curve_csv, write_curve_svg};
pub use point::Point;
