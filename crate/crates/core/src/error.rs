use crate::state::ModeLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("state is not normalized: squared norm {norm_sqr}")]
    Normalization { norm_sqr: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("two photons occupy the same mode {mode}")]
    Bunching { mode: ModeLabel },

    #[error("winding number {oam} is outside the OAM window [-{window}, {window}]")]
    WindowOverflow { oam: i64, window: i64 },

    #[error("basis is not closed: {mode} is mapped outside the enumerated modes")]
    BasisNotClosed { mode: ModeLabel },

    #[error("matrix is not unitary: max |U^dag U - I| = {error:e}")]
    NonUnitary { error: f64 },

    #[error("operator is not a generalized permutation on the occupied modes; the slot model does not apply")]
    NotSlotSafe,

    #[error("routing domain error: {0}")]
    Routing(String),

    #[error("netlist format error: {0}")]
    Format(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
