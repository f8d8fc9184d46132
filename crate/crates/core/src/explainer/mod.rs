//! The explainer: environment, objectives, start-node locator, training
//! loop and exact distributions for small graphs.

pub mod env;
pub mod exact;
pub mod locator;
pub mod loss;
pub mod train;

pub(crate) use env::argmax;
pub use env::{mutual_information_reward, Action, Env, GnnReward, Reward, RewardMode, Trajectory};
pub use locator::Locator;
pub use loss::{flow_matching_loss, logz_head, trajectory_balance_loss, LossSpace};
pub use train::{
    fit_env, train_explainer, train_explainer_with, training_csv, EpochRow, ExplainMode, Explainer,
    FitConfig, NodeInput, Objective, TrainConfig,
};
