// SPDX-License-Identifier: Apache-2.0
//! Seeds, mutation engines, corpus management, and the campaign loop.

mod campaign;
mod corpus;
mod mutate;

pub use crate::stimulus::{derive_layout, LayoutError, NetInput, PortField, PortLayout};
pub use campaign::{
    is_interesting, run_campaign, CampaignConfig, CampaignError, CampaignMeta, CampaignResult, Snapshot, StopReason,
};
pub use corpus::{fingerprint, Corpus, CorpusEntry, RECENT_WINDOW};
pub use mutate::{mutate, mutate_with, random_seed, Engine, FrameBounds, MutationOp, ARITH_MAX};
