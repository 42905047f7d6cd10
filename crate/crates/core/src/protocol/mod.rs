//! The swapping protocol: two atom–cavity pairs, the beam-splitter network,
//! detector clicks and the cavity states they herald.

pub mod herald;
pub mod joint;
pub mod modes;
pub mod report;
pub mod sampling;

pub use herald::{
    agrees_with_paper, all_patterns, click_distribution, herald_class, paper_label, ClickDistribution, ClickPattern,
    HeraldClass, HeraldResult,
};
pub use joint::{assemble_joint_state, assemble_joint_state_at, epr_decomposition_check, joint_beam_splitter, EprCheck, JointState};
pub use modes::{beam_splitter_unitary, Detector, FockBasis, Mode};
pub use report::{comment_header, joint_state_for, run_protocol, ProtocolConfig, ProtocolReport};
pub use sampling::{sample_shots, shot_sequence, Sampler, ShotCounts};
