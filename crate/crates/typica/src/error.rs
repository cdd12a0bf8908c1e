use thiserror::Error;

/// Errors raised by parsing, validation, scheduling and inference.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("universe mismatch: `{left}` vs `{right}`")]
    UniverseMismatch { left: String, right: String },

    #[error("variable `{0}` is not part of the joint space")]
    VariableNotInSpace(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown builtin `{0}` (expected one of: nixon, nixon-quaker-only, nixon-republican-only, nixon-both, yale)")]
    UnknownBuiltin(String),

    #[error("projection must keep at least one variable; use height for the zero-variable case")]
    EmptyProjection,

    #[error("joint space needs {cells} cells, exceeding the limit of {limit}")]
    CellLimit { cells: usize, limit: usize },

    #[error("universe `{universe}` has {size} elements; the power-set oracle is limited to {limit}")]
    OracleLimit {
        universe: String,
        size: usize,
        limit: usize,
    },

    #[error("layer expansion produced {count} disjuncts, exceeding the cap of {cap}")]
    DisjunctCap { count: usize, cap: usize },

    #[error("set {0} is not crisp")]
    NotCrisp(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid knowledge base: {0}")]
    Validation(String),

    #[error("priority edges form a cycle: {}", cycle.join(" -> "))]
    ScheduleCycle { cycle: Vec<String> },
}

pub type Result<T> = std::result::Result<T, Error>;
