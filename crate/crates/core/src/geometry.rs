//! Truncated lattice discretization of `R^n` (n = 1, 2) and the labeled node
//! sets used by the two partial-data geometries.
//!
//! The box `[-R, R]^n` carries a uniform lattice with spacing `h`; fields are
//! implicitly zero outside it. A node belongs to an open region iff its closed
//! cell `x + [-h/2, h/2]^n` lies inside the region. Compact regions (the
//! support set `Sigma`) use the same rule with closed boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative slack used when comparing lattice coordinates with shape
/// boundaries.
const BOUNDARY_SLACK: f64 = 1e-9;

/// A simple region of `R^n` given in configuration units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeSpec {
    /// One-dimensional interval `(lo, hi)`.
    Interval { lo: f64, hi: f64 },
    /// Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned rectangle with opposite corners `lo`, `hi`.
    Rect { lo: Vec<f64>, hi: Vec<f64> },
}

impl ShapeSpec {
    fn dim(&self) -> Option<usize> {
        match self {
            ShapeSpec::Interval { .. } => Some(1),
            ShapeSpec::Ball { center, .. } => Some(center.len()),
            ShapeSpec::Rect { lo, hi } if lo.len() == hi.len() => Some(lo.len()),
            ShapeSpec::Rect { .. } => None,
        }
    }

    fn validate(&self, name: &str, n: usize) -> Result<()> {
        if self.dim() != Some(n) {
            return Err(Error::Config(format!("region `{name}` is not {n}-dimensional")));
        }
        let ok = match self {
            ShapeSpec::Interval { lo, hi } => lo < hi,
            ShapeSpec::Ball { radius, .. } => *radius > 0.0,
            ShapeSpec::Rect { lo, hi } => lo.iter().zip(hi).all(|(a, b)| a < b),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("region `{name}` is degenerate")))
        }
    }

    /// Axis-aligned bounding box as per-axis `(lo, hi)` pairs.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        match self {
            ShapeSpec::Interval { lo, hi } => vec![(*lo, *hi)],
            ShapeSpec::Ball { center, radius } => center.iter().map(|c| (c - radius, c + radius)).collect(),
            ShapeSpec::Rect { lo, hi } => lo.iter().copied().zip(hi.iter().copied()).collect(),
        }
    }

    /// Whether the closed cell of half-width `half` centred at `p` lies in
    /// the region (open or closed boundary).
    pub fn contains_cell(&self, p: &[f64], half: f64, closed: bool) -> bool {
        let tol = BOUNDARY_SLACK * half.max(1e-300);
        let inside = |lo: f64, hi: f64, x: f64| {
            if closed {
                x - half >= lo - tol && x + half <= hi + tol
            } else {
                x - half > lo + tol && x + half < hi - tol
            }
        };
        match self {
            ShapeSpec::Interval { lo, hi } => inside(*lo, *hi, p[0]),
            ShapeSpec::Rect { lo, hi } => (0..p.len()).all(|d| inside(lo[d], hi[d], p[d])),
            ShapeSpec::Ball { center, radius } => {
                let far: f64 = p
                    .iter()
                    .zip(center)
                    .map(|(x, c)| {
                        let d = (x - c).abs() + half;
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt();
                if closed {
                    far <= radius + tol
                } else {
                    far < radius - tol
                }
            }
        }
    }

    /// Whether the point lies in the closed region.
    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.contains_cell(p, 0.0, true)
    }
}

/// Which partial-data theorem the geometry is meant to exercise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometryMode {
    /// Conductivities agree on the whole exterior.
    #[serde(rename = "theorem-1", alias = "theorem1")]
    ExteriorAgreement,
    /// Conductivities differ on a compact set `Sigma` away from the window.
    #[serde(rename = "theorem-2", alias = "theorem2")]
    CompactDifference,
}

/// Continuous description of the truncated domain, as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    pub n: usize,
    #[serde(rename = "R")]
    pub half_width: f64,
    pub h: f64,
    pub omega: ShapeSpec,
    pub w1: ShapeSpec,
    /// Defaults to `w1` when absent.
    #[serde(default)]
    pub w2: Option<ShapeSpec>,
    /// Enclosing window for the partial-data reduction; defaults to the
    /// union of `w1` and `w2`.
    #[serde(default)]
    pub w: Option<ShapeSpec>,
    #[serde(default)]
    pub sigma: Option<ShapeSpec>,
    pub mode: GeometryMode,
}

impl DomainConfig {
    /// Number of lattice cells per axis, `2R/h`.
    pub fn cells_per_axis(&self) -> Result<usize> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::Config(format!("spacing h = {} must be positive", self.h)));
        }
        if !(self.half_width > 0.0) {
            return Err(Error::Config("box half-width R must be positive".into()));
        }
        let ratio = self.half_width / self.h;
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "spacing h = {} does not divide the box half-width R = {}",
                self.h, self.half_width
            )));
        }
        Ok(2 * k as usize)
    }

    fn shapes(&self) -> Vec<(&'static str, &ShapeSpec)> {
        let mut v = vec![("omega", &self.omega), ("w1", &self.w1)];
        if let Some(w2) = &self.w2 {
            v.push(("w2", w2));
        }
        if let Some(w) = &self.w {
            v.push(("w", w));
        }
        if let Some(sigma) = &self.sigma {
            v.push(("sigma", sigma));
        }
        v
    }

    /// Checks the configuration invariants that do not need the lattice.
    pub fn validate(&self) -> Result<()> {
        if self.n != 1 && self.n != 2 {
            return Err(Error::Config(format!("dimension {} not supported (1 or 2)", self.n)));
        }
        self.cells_per_axis()?;
        for (name, shape) in self.shapes() {
            shape.validate(name, self.n)?;
            let r = self.half_width;
            if shape.bounds().iter().any(|&(lo, hi)| lo < -r || hi > r) {
                return Err(Error::Config(format!("region `{name}` leaves the box [-R, R]^n")));
            }
        }
        match (self.mode, &self.sigma) {
            (GeometryMode::ExteriorAgreement, Some(_)) => {
                Err(Error::Config("sigma must be absent in mode theorem-1".into()))
            }
            (GeometryMode::CompactDifference, None) => Err(Error::Config("sigma is required in mode theorem-2".into())),
            _ => Ok(()),
        }
    }

    /// Diameter of the union of all declared regions.
    pub fn region_diameter(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.n];
        let mut hi = vec![f64::NEG_INFINITY; self.n];
        for (_, shape) in self.shapes() {
            for (d, (a, b)) in shape.bounds().into_iter().enumerate() {
                lo[d] = lo[d].min(a);
                hi[d] = hi[d].max(b);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }
}

/// Uniform lattice on `[-R, R]^n` with classified node sets.
#[derive(Clone, Debug)]
pub struct GridDomain<T> {
    config: DomainConfig,
    h: T,
    per_axis: usize,
    coords: Vec<[T; 2]>,
    in_omega: Vec<bool>,
    omega: Vec<usize>,
    exterior: Vec<usize>,
    w1: Vec<usize>,
    w2: Vec<usize>,
    w: Vec<usize>,
    sigma: Option<Vec<usize>>,
}

/// Builds the lattice and classifies every node.
pub fn build_grid<T: Real>(config: &DomainConfig) -> Result<GridDomain<T>> {
    config.validate()?;
    let cells = config.cells_per_axis()?;
    let per_axis = cells + 1;
    let n = config.n;
    let total = per_axis.pow(n as u32);
    let r = config.half_width;
    let h = config.h;
    let half = 0.5 * h;

    let axis = |k: usize| -r + k as f64 * h;
    let mut points = Vec::with_capacity(total);
    for idx in 0..total {
        let p = if n == 1 { [axis(idx), 0.0] } else { [axis(idx / per_axis), axis(idx % per_axis)] };
        points.push(p);
    }

    let classify = |shape: &ShapeSpec, closed: bool| -> Vec<usize> {
        points.iter().enumerate().filter(|(_, p)| shape.contains_cell(&p[..n], half, closed)).map(|(i, _)| i).collect()
    };

    let omega = classify(&config.omega, false);
    if omega.is_empty() {
        return Err(Error::EmptyRegion("omega".into()));
    }
    let mut in_omega = vec![false; total];
    for &i in &omega {
        in_omega[i] = true;
    }
    let exterior: Vec<usize> = (0..total).filter(|&i| !in_omega[i]).collect();
    if exterior.is_empty() {
        return Err(Error::EmptyRegion("exterior".into()));
    }

    let nonempty = |name: &str, set: Vec<usize>| -> Result<Vec<usize>> {
        if set.is_empty() {
            Err(Error::EmptyRegion(name.into()))
        } else {
            Ok(set)
        }
    };
    let w1 = nonempty("w1", classify(&config.w1, false))?;
    let w2 = match &config.w2 {
        Some(shape) => nonempty("w2", classify(shape, false))?,
        None => w1.clone(),
    };
    let w = match &config.w {
        Some(shape) => nonempty("w", classify(shape, false))?,
        None => union(&w1, &w2),
    };
    let sigma = match &config.sigma {
        Some(shape) => Some(nonempty("sigma", classify(shape, true))?),
        None => None,
    };

    Ok(GridDomain {
        config: config.clone(),
        h: T::of(h),
        per_axis,
        coords: points.into_iter().map(|p| [T::of(p[0]), T::of(p[1])]).collect(),
        in_omega,
        omega,
        exterior,
        w1,
        w2,
        w,
        sigma,
    })
}

/// Sorted union of two sorted index sets.
pub fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl<T: Real> GridDomain<T> {
    pub fn config(&self) -> &DomainConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.n
    }

    pub fn spacing(&self) -> T {
        self.h
    }

    /// Box half-width `R`.
    pub fn half_width(&self) -> T {
        T::of(self.config.half_width)
    }

    /// Cell volume `h^n`.
    pub fn cell_volume(&self) -> T {
        if self.dim() == 1 {
            self.h
        } else {
            self.h * self.h
        }
    }

    /// Nodes per axis, `2R/h + 1`.
    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    /// Coordinates of node `i`; only the first `n` entries are meaningful.
    pub fn coord(&self, i: usize) -> [T; 2] {
        self.coords[i]
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i][..self.dim()]
    }

    pub fn distance(&self, i: usize, j: usize) -> T {
        let a = self.coords[i];
        let b = self.coords[j];
        let mut s = T::zero();
        for d in 0..self.dim() {
            let diff = a[d] - b[d];
            s += diff * diff;
        }
        s.sqrt()
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn exterior(&self) -> &[usize] {
        &self.exterior
    }

    pub fn w1(&self) -> &[usize] {
        &self.w1
    }

    pub fn w2(&self) -> &[usize] {
        &self.w2
    }

    /// Enclosing window `W` with `W1 ∪ W2 ⊆ W`.
    pub fn window(&self) -> &[usize] {
        &self.w
    }

    pub fn sigma(&self) -> Option<&[usize]> {
        self.sigma.as_deref()
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.in_omega[i]
    }

    /// Position of each node inside the exterior index list (`None` for
    /// interior nodes).
    pub fn exterior_positions(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.node_count()];
        for (k, &i) in self.exterior.iter().enumerate() {
            pos[i] = Some(k);
        }
        pos
    }

    /// Smallest node-to-node distance between two index sets.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> T {
        let mut best = T::max_value().unwrap_or_else(|| T::of(f64::MAX));
        for &i in a {
            for &j in b {
                let d = self.distance(i, j);
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Samples a function of the node coordinates.
    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<T> {
        (0..self.node_count())
            .map(|i| {
                let p: Vec<f64> = self.point(i).iter().map(|x| x.as_f64()).collect();
                T::of(f(&p))
            })
            .collect()
    }

    /// Samples a function on `subset`, zero elsewhere.
    pub fn sample_on<F: Fn(&[f64]) -> f64>(&self, subset: &[usize], f: F) -> Vec<T> {
        let mut out = vec![T::zero(); self.node_count()];
        for &i in subset {
            let p: Vec<f64> = self.point(i).iter().map(|x| x.as_f64()).collect();
            out[i] = T::of(f(&p));
        }
        out
    }

    /// Whether every node where `field` is nonzero lies in the inner half
    /// `[-R/2, R/2]^n` of the box.
    pub fn supported_in_inner_half(&self, field: &[T]) -> bool {
        let bound = self.half_width() * T::of(0.5) + self.h * T::of(1e-9);
        field.iter().enumerate().all(|(i, v)| *v == T::zero() || self.point(i).iter().all(|x| x.abs() <= bound))
    }
}

/// One checked geometric hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditItem {
    pub hypothesis: String,
    pub passed: bool,
    /// Measured node-set separation, when the hypothesis is a distance.
    pub measured: Option<f64>,
    pub required: Option<f64>,
    /// Advisory items do not affect [`AuditReport::passed`].
    pub advisory: bool,
}

/// Pass/fail record of the geometric hypotheses of one theorem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mode: GeometryMode,
    pub items: Vec<AuditItem>,
    pub passed: bool,
}

impl AuditReport {
    pub fn failures(&self) -> impl Iterator<Item = &AuditItem> {
        self.items.iter().filter(|i| !i.passed && !i.advisory)
    }
}

/// Checks the geometric hypotheses of the selected theorem. Never fails;
/// violations are reported in the items.
pub fn validate_geometry<T: Real>(domain: &GridDomain<T>, mode: GeometryMode) -> AuditReport {
    let h = domain.spacing().as_f64();
    let margin = 2.0 * h;
    let mut items = Vec::new();
    let mut separation = |name: String, a: &[usize], b: &[usize]| {
        let d = domain.set_distance(a, b).as_f64();
        items.push(AuditItem {
            hypothesis: name,
            passed: d >= margin - 1e-9 * h,
            measured: Some(d),
            required: Some(margin),
            advisory: false,
        });
    };

    match mode {
        GeometryMode::ExteriorAgreement => {
            separation("W1 compactly inside the exterior of Omega".into(), domain.w1(), domain.omega());
            separation("W2 compactly inside the exterior of Omega".into(), domain.w2(), domain.omega());
        }
        GeometryMode::CompactDifference => {
            let windows = union(domain.w1(), domain.w2());
            let windows = union(&windows, domain.window());
            separation("closure(W) disjoint from closure(Omega)".into(), &windows, domain.omega());
            match domain.sigma() {
                Some(sigma) => separation("closure(W) disjoint from Sigma".into(), &windows, sigma),
                None => items.push(AuditItem {
                    hypothesis: "Sigma declared".into(),
                    passed: false,
                    measured: None,
                    required: None,
                    advisory: false,
                }),
            }
        }
    }

    let window_nested = domain.w1().iter().chain(domain.w2()).all(|i| domain.window().binary_search(i).is_ok());
    items.push(AuditItem {
        hypothesis: "W1 and W2 contained in W".into(),
        passed: window_nested,
        measured: None,
        required: None,
        advisory: false,
    });

    let diameter = domain.config().region_diameter();
    let r = domain.config().half_width;
    items.push(AuditItem {
        hypothesis: "box half-width at least twice the region diameter".into(),
        passed: r >= 2.0 * diameter,
        measured: Some(r),
        required: Some(2.0 * diameter),
        advisory: true,
    });

    let passed = items.iter().all(|i| i.passed || i.advisory);
    AuditReport { mode, items, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: f64, hi: f64) -> ShapeSpec {
        ShapeSpec::Interval { lo, hi }
    }

    fn config_1d(r: f64, h: f64) -> DomainConfig {
        DomainConfig {
            n: 1,
            half_width: r,
            h,
            omega: interval(-1.0, 1.0),
            w1: interval(2.0, 3.0),
            w2: None,
            w: None,
            sigma: None,
            mode: GeometryMode::ExteriorAgreement,
        }
    }

    #[test]
    fn one_dimensional_lattice_classification() {
        let g = build_grid::<f64>(&config_1d(4.0, 0.5)).unwrap();
        assert_eq!(g.node_count(), 17);
        let xs: Vec<f64> = g.omega().iter().map(|&i| g.coord(i)[0]).collect();
        assert_eq!(xs, vec![-0.5, 0.0, 0.5]);
        assert_eq!(g.omega().len() + g.exterior().len(), g.node_count());
        assert!(g.w1().iter().all(|i| !g.omega().contains(i)));
    }

    #[test]
    fn two_dimensional_count() {
        let cfg = DomainConfig {
            n: 2,
            half_width: 2.0,
            h: 1.0,
            omega: ShapeSpec::Ball { center: vec![0.0, 0.0], radius: 1.0 },
            w1: ShapeSpec::Rect { lo: vec![0.4, 0.4], hi: vec![2.0, 2.0] },
            w2: None,
            w: None,
            sigma: None,
            mode: GeometryMode::ExteriorAgreement,
        };
        let g = build_grid::<f64>(&cfg).unwrap();
        assert_eq!(g.node_count(), 25);
        assert_eq!(g.omega(), &[12]);
    }

    #[test]
    fn spacing_must_divide_box() {
        let err = build_grid::<f64>(&config_1d(4.0, 0.3)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn empty_region_is_named() {
        let mut cfg = config_1d(4.0, 0.5);
        cfg.w1 = interval(2.0, 2.4);
        match build_grid::<f64>(&cfg) {
            Err(Error::EmptyRegion(name)) => assert_eq!(name, "w1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sigma_presence_follows_mode() {
        let mut cfg = config_1d(4.0, 0.5);
        cfg.sigma = Some(interval(-1.0, 1.0));
        assert!(cfg.validate().is_err());
        cfg.mode = GeometryMode::CompactDifference;
        assert!(cfg.validate().is_ok());
        cfg.sigma = None;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn theorem_one_separated_window_passes() {
        let g = build_grid::<f64>(&config_1d(4.0, 0.25)).unwrap();
        let report = validate_geometry(&g, GeometryMode::ExteriorAgreement);
        assert!(report.passed, "{report:?}");
        let sep = report.items[0].measured.unwrap();
        assert!(sep >= 1.0);
    }

    #[test]
    fn theorem_two_overlap_fails_with_named_hypothesis() {
        let mut cfg = config_1d(4.0, 0.25);
        cfg.mode = GeometryMode::CompactDifference;
        cfg.sigma = Some(interval(1.5, 2.5));
        let g = build_grid::<f64>(&cfg).unwrap();
        let report = validate_geometry(&g, GeometryMode::CompactDifference);
        assert!(!report.passed);
        let failed: Vec<_> = report.failures().map(|i| i.hypothesis.as_str()).collect();
        assert_eq!(failed, vec!["closure(W) disjoint from Sigma"]);
    }

    #[test]
    fn theorem_two_sigma_equal_to_closed_omega_passes() {
        let mut cfg = config_1d(4.0, 0.25);
        cfg.mode = GeometryMode::CompactDifference;
        cfg.sigma = Some(interval(-1.0, 1.0));
        let g = build_grid::<f64>(&cfg).unwrap();
        assert!(validate_geometry(&g, GeometryMode::CompactDifference).passed);
    }

    #[test]
    fn validate_is_pure() {
        let g = build_grid::<f64>(&config_1d(4.0, 0.25)).unwrap();
        let a = validate_geometry(&g, GeometryMode::ExteriorAgreement);
        let b = validate_geometry(&g, GeometryMode::ExteriorAgreement);
        assert_eq!(a, b);
    }

    #[test]
    fn config_roundtrips_through_json() {
        let json = r#"{"n":1,"R":4,"h":0.5,"omega":{"interval":{"lo":-1,"hi":1}},
                       "w1":{"interval":{"lo":2,"hi":3}},"mode":"theorem-1"}"#;
        let cfg: DomainConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg, config_1d(4.0, 0.5));
    }
}
