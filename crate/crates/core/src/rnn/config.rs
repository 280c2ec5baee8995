use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::MULTI_HORIZON_STEPS;
use crate::error::{Error, Result};
use crate::features::{VariableSet, IMAGE_FEATURE_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RnnType {
    Lstm,
    Gru,
    Bdlstm,
    Bdgru,
}

impl RnnType {
    pub const ALL: [RnnType; 4] = [RnnType::Lstm, RnnType::Gru, RnnType::Bdlstm, RnnType::Bdgru];

    pub fn cell(self) -> CellKind {
        match self {
            RnnType::Lstm | RnnType::Bdlstm => CellKind::Lstm,
            RnnType::Gru | RnnType::Bdgru => CellKind::Gru,
        }
    }

    pub fn bidirectional(self) -> bool {
        matches!(self, RnnType::Bdlstm | RnnType::Bdgru)
    }
}

impl FromStr for RnnType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lstm" => Ok(RnnType::Lstm),
            "gru" => Ok(RnnType::Gru),
            "bdlstm" => Ok(RnnType::Bdlstm),
            "bdgru" => Ok(RnnType::Bdgru),
            other => Err(Error::InvalidArgument(format!(
                "unknown rnn type `{other}` (lstm, gru, bdlstm, bdgru)"
            ))),
        }
    }
}

impl fmt::Display for RnnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RnnType::Lstm => "lstm",
            RnnType::Gru => "gru",
            RnnType::Bdlstm => "bdlstm",
            RnnType::Bdgru => "bdgru",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Lstm,
    Gru,
}

impl CellKind {
    /// Number of stacked gate blocks in the weight matrices.
    pub fn gates(self) -> usize {
        match self {
            CellKind::Lstm => 4,
            CellKind::Gru => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizonMode {
    Single,
    Multi,
}

impl HorizonMode {
    pub fn outputs(self) -> usize {
        match self {
            HorizonMode::Single => 1,
            HorizonMode::Multi => MULTI_HORIZON_STEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub rnn_type: RnnType,
    pub hidden_dim: usize,
    pub num_layers: usize,
    /// Dropout probability on the recurrent readout.
    pub dropout: f64,
    /// Width of the image feature part of each frame.
    pub image_dim: usize,
    pub vars: VariableSet,
    pub horizon: HorizonMode,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            rnn_type: RnnType::Lstm,
            hidden_dim: 4,
            num_layers: 1,
            dropout: 0.5,
            image_dim: IMAGE_FEATURE_DIM,
            vars: VariableSet::NONE,
            horizon: HorizonMode::Single,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_dim == 0 {
            return Err(Error::InvalidArgument(
                "hidden dimension must be at least 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidArgument(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if self.num_layers != 1 {
            return Err(Error::InvalidArgument(format!(
                "only single-layer recurrent models are supported (got {} layers)",
                self.num_layers
            )));
        }
        if self.image_dim == 0 {
            return Err(Error::InvalidArgument(
                "image feature dimension must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Width D of each assembled input vector.
    pub fn input_dim(&self) -> usize {
        self.image_dim + self.vars.extra_dim()
    }

    /// Width of the recurrent readout fed to the head.
    pub fn readout_dim(&self) -> usize {
        if self.rnn_type.bidirectional() {
            2 * self.hidden_dim
        } else {
            self.hidden_dim
        }
    }

    pub fn outputs(&self) -> usize {
        self.horizon.outputs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ModelConfig::default();
        assert_eq!((c.hidden_dim, c.num_layers, c.dropout), (4, 1, 0.5));
        assert_eq!(c.input_dim(), 512);
        c.validate().unwrap();
    }

    #[test]
    fn widths() {
        let c = ModelConfig {
            rnn_type: RnnType::Bdlstm,
            vars: VariableSet::ALL,
            horizon: HorizonMode::Multi,
            ..Default::default()
        };
        assert_eq!(c.readout_dim(), 8);
        assert_eq!(c.input_dim(), 521);
        assert_eq!(c.outputs(), 8);
    }

    #[test]
    fn invalid_configs() {
        let bad = |f: fn(&mut ModelConfig)| {
            let mut c = ModelConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.hidden_dim = 0));
        assert!(bad(|c| c.dropout = 1.0));
        assert!(bad(|c| c.dropout = -0.1));
        assert!(bad(|c| c.num_layers = 2));
    }

    #[test]
    fn parse_rnn_types() {
        for t in RnnType::ALL {
            assert_eq!(t.to_string().parse::<RnnType>().unwrap(), t);
        }
        assert!("rnn".parse::<RnnType>().is_err());
    }
}
