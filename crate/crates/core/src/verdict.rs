use serde::Serialize;

/// Overall answer to "is the form positive definite?".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PD")]
    Pd,
    #[serde(rename = "not-PD")]
    NotPd,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl Verdict {
    /// 0 = PD, 1 = not PD, 2 = undetermined.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pd => 0,
            Verdict::NotPd => 1,
            Verdict::Undetermined => 2,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pd => "PD",
            Verdict::NotPd => "not-PD",
            Verdict::Undetermined => "undetermined",
        })
    }
}
