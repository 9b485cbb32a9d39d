// placeholder
use serde::{Deserialize, Serialize};
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub sigma: f64,
}
