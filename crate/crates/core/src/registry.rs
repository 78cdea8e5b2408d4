//! Named convexities over one ground space.

use std::collections::HashMap;
use std::sync::Arc;

use crate::convexity::Convexity;
use crate::error::{Error, Result};
use crate::expr::FractoExpr;
use crate::fracto::{Block, Fractoconvexity};
use crate::space::GroundSpace;

/// A ground space with a registry of convexities, looked up by id.
#[derive(Clone, Debug)]
pub struct ConvexSpace {
    ground: GroundSpace,
    convexities: Vec<Arc<Convexity>>,
    index: HashMap<String, usize>,
}

impl ConvexSpace {
    pub fn new(ground: GroundSpace) -> Self {
        ConvexSpace { ground, convexities: Vec::new(), index: HashMap::new() }
    }

    pub fn ground(&self) -> &GroundSpace {
        &self.ground
    }

    pub fn insert(&mut self, conv: Convexity) -> Result<Arc<Convexity>> {
        if *conv.space() != self.ground {
            return Err(Error::SpaceMismatch);
        }
        if self.index.contains_key(conv.id()) {
            return Err(Error::DuplicateId(conv.id().to_string()));
        }
        let conv = Arc::new(conv);
        self.index.insert(conv.id().to_string(), self.convexities.len());
        self.convexities.push(conv.clone());
        Ok(conv)
    }

    pub fn get(&self, id: &str) -> Result<&Arc<Convexity>> {
        self.index
            .get(id)
            .map(|&i| &self.convexities[i])
            .ok_or_else(|| Error::UnknownConvexityId(id.to_string()))
    }

    pub fn resolve<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<Arc<Convexity>>> {
        ids.iter().map(|id| self.get(id.as_ref()).cloned()).collect()
    }

    /// Convexities in insertion order.
    pub fn convexities(&self) -> &[Arc<Convexity>] {
        &self.convexities
    }

    /// `threshold / {ids}`.
    pub fn frac<S: AsRef<str>>(&self, threshold: usize, ids: &[S]) -> Result<Fractoconvexity> {
        Fractoconvexity::new(vec![Block::new(self.resolve(ids)?, threshold)?])
    }

    /// Evaluates an expression: `v` is [`Fractoconvexity::join`], `^` is
    /// [`Fractoconvexity::meet`].
    pub fn eval(&self, expr: &FractoExpr) -> Result<Fractoconvexity> {
        match expr {
            FractoExpr::Frac { threshold, ids } => self.frac(*threshold, ids),
            FractoExpr::Join(l, r) => self.eval(l)?.join(&self.eval(r)?),
            FractoExpr::Meet(l, r) => self.eval(l)?.meet(&self.eval(r)?),
        }
    }

    /// Parses and evaluates.
    pub fn parse(&self, text: &str) -> Result<Fractoconvexity> {
        self.eval(&crate::expr::parse_expr(text)?)
    }
}
