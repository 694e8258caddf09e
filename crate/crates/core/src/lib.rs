//! Min-cost popular matchings in capacitated house-allocation instances,
//! min-cost copy augmentation, and hardness gadgets with verifiers.

pub mod augment;
pub mod cli;
pub mod decomposition;
pub mod instance;
pub mod oracle;
pub mod popmatch;
pub mod reductions;
