use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Machine-readable outcome of one command.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub input_sha256: String,
    pub mode: String,
    pub verdict: String,
    pub value: Value,
    pub iterations: Option<u64>,
    pub details: Value,
    pub oracle: Option<OracleCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(skip)]
    pub headline: String,
    #[serde(skip)]
    pub exit_code: u8,
}

#[derive(Debug, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub result: Value,
    pub agrees: bool,
}

impl Report {
    pub fn new(command: &str, input: &[u8], mode: String) -> Self {
        Self {
            command: command.to_string(),
            args: Vec::new(),
            input_sha256: hex_digest(input),
            mode,
            verdict: String::new(),
            value: Value::Null,
            iterations: None,
            details: Value::Null,
            oracle: None,
            wall_time_ms: None,
            headline: String::new(),
            exit_code: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.headline);
        if let Some(t) = self.iterations {
            out.push_str(&format!("iterations: {t}\n"));
        }
        out.push_str(&format!("mode: {}\n", self.mode));
        if let Some(o) = &self.oracle {
            out.push_str(&format!(
                "oracle {}: {} ({})\n",
                o.name,
                o.result,
                if o.agrees { "agrees" } else { "DISAGREES" }
            ));
        }
        out
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Core(opscale::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) | CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<opscale::Error> for CliError {
    fn from(e: opscale::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(opscale::Error::PrecisionExhausted { .. } | opscale::Error::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}
