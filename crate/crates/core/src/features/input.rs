//! Assembly of the per-frame recurrent input vector.
//!
//! Layout: `[image | looking | orientation | movement | center]`, where each
//! categorical block is the variable's embedding row and the center block is
//! `(u_c, v_c)`. Disabled variables are omitted.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::embedding::{embed_dim, EmbeddingTable};
use crate::data::FrameInput;
use crate::error::{Error, Result};

pub const LOOKING_CATEGORIES: usize = 2;
pub const ORIENTATION_CATEGORIES: usize = 4;
pub const MOVEMENT_CATEGORIES: usize = 2;

/// Which additional variables accompany the image features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VariableSet {
    pub looking: bool,
    pub orientation: bool,
    pub movement: bool,
    pub center: bool,
}

impl VariableSet {
    pub const NONE: Self = Self {
        looking: false,
        orientation: false,
        movement: false,
        center: false,
    };
    pub const ALL: Self = Self {
        looking: true,
        orientation: true,
        movement: true,
        center: true,
    };

    /// Width of the non-image part of the input vector.
    pub fn extra_dim(&self) -> usize {
        let e = |on: bool, n: usize| {
            if on {
                embed_dim(n).expect("fixed cardinality")
            } else {
                0
            }
        };
        e(self.looking, LOOKING_CATEGORIES)
            + e(self.orientation, ORIENTATION_CATEGORIES)
            + e(self.movement, MOVEMENT_CATEGORIES)
            + if self.center { 2 } else { 0 }
    }
}

impl FromStr for VariableSet {
    type Err = Error;

    /// Accepts `all`, `none`, or a comma-separated subset of
    /// `looking,orientation,movement,center`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => return Ok(Self::ALL),
            "none" | "" => return Ok(Self::NONE),
            _ => {}
        }
        let mut v = Self::NONE;
        for part in s.split(',').map(str::trim) {
            match part {
                "looking" => v.looking = true,
                "orientation" => v.orientation = true,
                "movement" => v.movement = true,
                "center" => v.center = true,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown variable `{other}`"
                    )))
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Display for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::ALL {
            return f.write_str("all");
        }
        if *self == Self::NONE {
            return f.write_str("none");
        }
        let names: Vec<&str> = [
            (self.looking, "looking"),
            (self.orientation, "orientation"),
            (self.movement, "movement"),
            (self.center, "center"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        f.write_str(&names.join(","))
    }
}

/// Embedding tables for the enabled categorical variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Embeddings {
    pub looking: Option<EmbeddingTable>,
    pub orientation: Option<EmbeddingTable>,
    pub movement: Option<EmbeddingTable>,
}

impl Embeddings {
    pub fn new<R: Rng + ?Sized>(vars: &VariableSet, rng: &mut R) -> Self {
        let mut table = |on: bool, n: usize| {
            on.then(|| EmbeddingTable::new(n, rng).expect("fixed cardinality"))
        };
        Self {
            looking: table(vars.looking, LOOKING_CATEGORIES),
            orientation: table(vars.orientation, ORIENTATION_CATEGORIES),
            movement: table(vars.movement, MOVEMENT_CATEGORIES),
        }
    }

    pub fn zeros(vars: &VariableSet) -> Self {
        let table =
            |on: bool, n: usize| on.then(|| EmbeddingTable::zeros(n).expect("fixed cardinality"));
        Self {
            looking: table(vars.looking, LOOKING_CATEGORIES),
            orientation: table(vars.orientation, ORIENTATION_CATEGORIES),
            movement: table(vars.movement, MOVEMENT_CATEGORIES),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            looking: self.looking.as_ref().map(EmbeddingTable::zeros_like),
            orientation: self.orientation.as_ref().map(EmbeddingTable::zeros_like),
            movement: self.movement.as_ref().map(EmbeddingTable::zeros_like),
        }
    }

    fn slots(&self) -> [(&'static str, Option<&EmbeddingTable>); 3] {
        [
            ("looking", self.looking.as_ref()),
            ("orientation", self.orientation.as_ref()),
            ("movement", self.movement.as_ref()),
        ]
    }

    /// Routes the gradient of one assembled input vector back into the rows
    /// selected by the frame's codes.
    pub fn accumulate(&mut self, frame: &FrameInput, image_dim: usize, grad: &[f64]) -> Result<()> {
        let mut offset = image_dim;
        let slots = [
            ("looking", self.looking.as_mut(), frame.looking),
            ("orientation", self.orientation.as_mut(), frame.orientation),
            ("movement", self.movement.as_mut(), frame.movement),
        ];
        for (name, table, code) in slots {
            if let Some(table) = table {
                let d = table.dim();
                let code = code.ok_or(Error::MissingVariable(name))?;
                table.accumulate(code, &grad[offset..offset + d])?;
                offset += d;
            }
        }
        Ok(())
    }
}

/// Builds the recurrent input for one frame.
pub fn assemble_input(
    frame: &FrameInput,
    embeddings: &Embeddings,
    vars: &VariableSet,
    image_dim: usize,
) -> Result<Vec<f64>> {
    if frame.image.len() != image_dim {
        return Err(Error::Shape(format!(
            "image feature length {} does not match model input {image_dim}",
            frame.image.len()
        )));
    }
    let mut out = Vec::with_capacity(image_dim + vars.extra_dim());
    out.extend_from_slice(&frame.image);
    let codes = [frame.looking, frame.orientation, frame.movement];
    let enabled = [vars.looking, vars.orientation, vars.movement];
    for (((name, table), code), on) in embeddings.slots().into_iter().zip(codes).zip(enabled) {
        if !on {
            continue;
        }
        let table = table.ok_or(Error::MissingVariable(name))?;
        let code = code.ok_or(Error::MissingVariable(name))?;
        out.extend_from_slice(table.embed(code)?);
    }
    if vars.center {
        let (u, v) = frame.center.ok_or(Error::MissingVariable("center"))?;
        out.push(u);
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frame() -> FrameInput {
        FrameInput {
            image: vec![0.5; 512].into(),
            looking: Some(1),
            orientation: Some(2),
            movement: Some(0),
            center: Some((0.1, 0.9)),
        }
    }

    fn build(vars: VariableSet) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let emb = Embeddings::new(&vars, &mut rng);
        assemble_input(&frame(), &emb, &vars, 512)
    }

    #[test]
    fn all_variables_give_521() {
        let extra: usize = [2, 4, 2]
            .iter()
            .map(|&n| embed_dim(n).unwrap())
            .sum::<usize>()
            + 2;
        assert_eq!(extra, 9);
        let v = build(VariableSet::ALL).unwrap();
        assert_eq!(v.len(), 512 + extra);
        assert_eq!(v.len(), 521);
        assert_eq!(&v[519..], &[0.1, 0.9]);
    }

    #[test]
    fn no_variables_give_512() {
        assert_eq!(build(VariableSet::NONE).unwrap().len(), 512);
    }

    #[test]
    fn orientation_only_gives_515() {
        let vars = VariableSet {
            orientation: true,
            ..VariableSet::NONE
        };
        assert_eq!(build(vars).unwrap().len(), 512 + embed_dim(4).unwrap());
    }

    #[test]
    fn every_subset_has_predicted_length() {
        for mask in 0..16u8 {
            let vars = VariableSet {
                looking: mask & 1 != 0,
                orientation: mask & 2 != 0,
                movement: mask & 4 != 0,
                center: mask & 8 != 0,
            };
            let expected = 512
                + vars.looking as usize * embed_dim(2).unwrap()
                + vars.orientation as usize * embed_dim(4).unwrap()
                + vars.movement as usize * embed_dim(2).unwrap()
                + 2 * vars.center as usize;
            assert_eq!(build(vars).unwrap().len(), expected, "{vars}");
            assert_eq!(vars.to_string().parse::<VariableSet>().unwrap(), vars);
        }
    }

    #[test]
    fn missing_enabled_variable_errors() {
        let vars = VariableSet::ALL;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let emb = Embeddings::new(&vars, &mut rng);
        let mut f = frame();
        f.center = None;
        assert!(matches!(
            assemble_input(&f, &emb, &vars, 512),
            Err(Error::MissingVariable("center"))
        ));
        let mut f = frame();
        f.movement = None;
        assert!(matches!(
            assemble_input(&f, &emb, &vars, 512),
            Err(Error::MissingVariable("movement"))
        ));
    }

    #[test]
    fn block_order() {
        let vars = VariableSet::ALL;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let emb = Embeddings::new(&vars, &mut rng);
        let v = assemble_input(&frame(), &emb, &vars, 512).unwrap();
        assert_eq!(
            &v[512..514],
            emb.looking.as_ref().unwrap().embed(1).unwrap()
        );
        assert_eq!(
            &v[514..517],
            emb.orientation.as_ref().unwrap().embed(2).unwrap()
        );
        assert_eq!(
            &v[517..519],
            emb.movement.as_ref().unwrap().embed(0).unwrap()
        );
    }

    #[test]
    fn parse_variable_lists() {
        assert_eq!("all".parse::<VariableSet>().unwrap(), VariableSet::ALL);
        assert_eq!("none".parse::<VariableSet>().unwrap(), VariableSet::NONE);
        let v: VariableSet = "looking, center".parse().unwrap();
        assert!(v.looking && v.center && !v.orientation && !v.movement);
        assert!("gaze".parse::<VariableSet>().is_err());
    }
}
