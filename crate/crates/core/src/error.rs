use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid workspace: {0}")]
    InvalidWorkspace(String),
    #[error("position ({0}, {1}) is outside the free space")]
    PositionOutsideFreeSpace(f64, f64),
    #[error("no perfect matching of finite cost exists")]
    InfeasibleMatching,
    #[error("infeasible instance: {0}")]
    InfeasibleInstance(String),
    #[error("separation constraints violated: {0}")]
    ConstraintViolation(String),
    #[error("no interrupting target exists in the blocking digraph")]
    NoInterruptingTarget,
    #[error("invalid switch: connector length {0} is not below 2 - eps")]
    InvalidSwitch(f64),
    #[error("position is not interrupting for the driver path (overlap {0})")]
    NotInterrupting(f64),
    #[error("path extension blocked: {0}")]
    ExtensionBlocked(String),
    #[error("last approach of a blocker lies at the path end (w = {0})")]
    BlockerAtPathEnd(f64),
    #[error("workspace is not a simple polygon")]
    NotSimplePolygon,
    #[error("point lies on a cell boundary of the corridor partition")]
    AmbiguousCell,
    #[error("separation violation: {0}")]
    SeparationViolation(String),
    #[error("malformed plan: {0}")]
    MalformedPlan(String),
    #[error("fixture generation failed: {0}")]
    GenerationFailed(String),
    #[error("planning failed: {0}")]
    PlanningFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
