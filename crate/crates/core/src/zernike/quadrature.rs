//! Product quadrature on the unit disk.
//!
//! Radially, `int_0^1 f(r) r dr = 1/2 int_0^1 f(sqrt(u)) du` is integrated
//! with Gauss-Legendre nodes in `u`; angularly, `M` equispaced angles with
//! weight `2 pi / M` integrate `e^{i k phi}` exactly for `|k| < M`.
//!
//! This rule only serves as an independent check of coefficient-space
//! inner products; production code never integrates numerically.

use std::f64::consts::TAU;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::point::PolarPoint;

#[derive(Debug, Clone)]
pub struct DiskQuadrature {
    radial_nodes: Vec<f64>,
    radial_weights: Vec<f64>,
    angle_count: usize,
}

impl DiskQuadrature {
    /// `radial_count` Gauss nodes in `u = r^2` and `angle_count` angles.
    pub fn new(radial_count: usize, angle_count: usize) -> Self {
        assert!(angle_count > 0, "need at least one angle");
        // gauss-quad refuses rules below two nodes
        let rule = GaussLegendre::new(radial_count.max(2)).expect("at least two nodes");
        let (radial_nodes, radial_weights) = rule
            .iter()
            .map(|(x, w)| (((x + 1.0) / 2.0).sqrt(), w / 4.0))
            .unzip();
        Self {
            radial_nodes,
            radial_weights,
            angle_count,
        }
    }

    /// Exact for products of two members of `V_degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree + 1, 4 * degree + 1)
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial_nodes
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn angle_count(&self) -> usize {
        self.angle_count
    }

    pub fn len(&self) -> usize {
        self.radial_nodes.len() * self.angle_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All `(point, weight)` pairs of the tensor rule.
    pub fn nodes(&self) -> Vec<(PolarPoint, f64)> {
        let dphi = TAU / self.angle_count as f64;
        let mut out = Vec::with_capacity(self.len());
        for (&r, &w) in self.radial_nodes.iter().zip(&self.radial_weights) {
            for k in 0..self.angle_count {
                out.push((
                    PolarPoint {
                        r,
                        phi: k as f64 * dphi,
                    },
                    w * dphi,
                ));
            }
        }
        out
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes().iter().map(|(_, w)| w).sum()
    }

    pub fn integrate<F>(&self, mut f: F) -> Complex64
    where
        F: FnMut(PolarPoint) -> Complex64,
    {
        self.nodes().into_iter().map(|(p, w)| f(p) * w).sum()
    }

    /// `int f conj(g)` over the disk.
    pub fn inner_product<F, G>(&self, mut f: F, mut g: G) -> Complex64
    where
        F: FnMut(PolarPoint) -> Complex64,
        G: FnMut(PolarPoint) -> Complex64,
    {
        self.integrate(|p| f(p) * g(p).conj())
    }
}
