//! Sign-vector partitions of two-dimensional coefficient slices.

use std::collections::{BTreeMap, VecDeque};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chua::{chua_general_sets, chua_sets_specialized, ChuaModel, ChuaParams};
use crate::error::{Error, Result};
use crate::feedback::{controllable_sets, uncontrollable_sets, ControllableGains, CubicPlant, CubicSystem, UncontrollableGains};
use crate::normal_form::{NfConstants, UnfoldingPoint};
use crate::sets::{normal_form_sets, SetResidual};
use crate::sim::{
    classify_portrait, fmt17, ic_grid, EquilibriumScan, IntegratorConfig, NormalFormField, PortraitOptions, PortraitSummary,
};

pub const MIN_RESOLUTION: usize = 16;

pub type Coords = BTreeMap<String, f64>;

/// Which family of residuals is evaluated, and in which coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    /// Coordinates `mu0..mu3`.
    NormalForm {
        a1: f64,
        b0: f64,
        #[serde(default)]
        b1: Option<f64>,
    },
    /// Coordinates `v0..v3`; `plant` is a preset name.
    Controllable { plant: String },
    /// Coordinates `n0, n1, n2`.
    Uncontrollable,
    /// Coordinates `nu1, nu2` at the fixed specialization.
    ChuaSpecialized,
    /// Coordinates `nu0..nu3`.
    ChuaGeneral { alpha: f64, a: f64 },
}

impl Family {
    pub fn coordinate_names(&self) -> &'static [&'static str] {
        match self {
            Family::NormalForm { .. } => &["mu0", "mu1", "mu2", "mu3"],
            Family::Controllable { .. } => &["v0", "v1", "v2", "v3"],
            Family::Uncontrollable => &["n0", "n1", "n2"],
            Family::ChuaSpecialized => &["nu1", "nu2"],
            Family::ChuaGeneral { .. } => &["nu0", "nu1", "nu2", "nu3"],
        }
    }

    fn get(c: &Coords, k: &str) -> f64 {
        c.get(k).copied().unwrap_or(0.0)
    }

    fn constants(&self) -> Result<NfConstants> {
        match self {
            Family::NormalForm { a1, b0, b1 } => {
                let k = NfConstants::new(*a1, *b0)?;
                match b1 {
                    Some(b) => k.with_b1(*b),
                    None => Ok(k),
                }
            }
            _ => Err(Error::Config("not a normal-form family".into())),
        }
    }

    fn unfolding(c: &Coords) -> UnfoldingPoint {
        UnfoldingPoint::new(Self::get(c, "mu0"), Self::get(c, "mu1"), Self::get(c, "mu2"), Self::get(c, "mu3"))
    }

    fn controllable(c: &Coords) -> ControllableGains {
        ControllableGains::new(Self::get(c, "v0"), Self::get(c, "v1"), Self::get(c, "v2"), Self::get(c, "v3"))
    }

    fn uncontrollable(c: &Coords) -> UncontrollableGains {
        UncontrollableGains::new(Self::get(c, "n0"), Self::get(c, "n1"), Self::get(c, "n2"))
    }

    fn chua(&self, c: &Coords) -> ChuaParams {
        let (alpha, a, nu0, nu3) = match self {
            Family::ChuaGeneral { alpha, a } => (*alpha, *a, Self::get(c, "nu0"), Self::get(c, "nu3")),
            _ => (0.8, 1.0, 0.0, 0.3),
        };
        ChuaParams::bt(alpha, a, [nu0, Self::get(c, "nu1"), Self::get(c, "nu2"), nu3])
    }

    /// All residuals of the family at one point.
    pub fn evaluate(&self, c: &Coords) -> Result<Vec<SetResidual>> {
        match self {
            Family::NormalForm { .. } => Ok(normal_form_sets(&Self::unfolding(c), &self.constants()?)),
            Family::Controllable { plant } => controllable_sets(&Self::controllable(c), &CubicPlant::preset(plant)?),
            Family::Uncontrollable => uncontrollable_sets(&Self::uncontrollable(c)),
            Family::ChuaSpecialized => chua_sets_specialized(Self::get(c, "nu1"), Self::get(c, "nu2")),
            Family::ChuaGeneral { .. } => chua_general_sets(&self.chua(c)),
        }
    }

    /// Simulated portrait at one point.
    pub fn portrait(&self, c: &Coords, opts: &VerifyOptions) -> Result<PortraitSummary> {
        let ics = ic_grid((-opts.ic_box, opts.ic_box), (-opts.ic_box, opts.ic_box), opts.ic_grid);
        let po = PortraitOptions {
            integrator: IntegratorConfig::with_horizon(opts.t_max),
            backward: opts.backward,
            scan: opts.scan,
            dedup_tol: 1e-3,
        };
        match self {
            Family::NormalForm { .. } => {
                classify_portrait(&NormalFormField::new(Self::unfolding(c), self.constants()?), &ics, &po)
            }
            Family::Controllable { plant } => {
                let m = CubicSystem::controllable(CubicPlant::preset(plant)?, Self::controllable(c));
                classify_portrait(&m, &ics, &po)
            }
            Family::Uncontrollable => {
                let m = CubicSystem::uncontrollable(CubicPlant::preset("alternating")?, Self::uncontrollable(c));
                classify_portrait(&m, &ics, &po)
            }
            Family::ChuaSpecialized | Family::ChuaGeneral { .. } => {
                let m = ChuaModel::new(self.chua(c))?;
                let ics3: Vec<[f64; 3]> = ics.iter().map(|[x, y]| [*x, *y, y - x]).collect();
                let po = PortraitOptions { backward: false, ..po };
                classify_portrait(&m, &ics3, &po)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, n: usize) -> Self {
        Self {
            name: name.to_string(),
            min,
            max,
            n,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec {
    pub family: Family,
    pub x: Axis,
    pub y: Axis,
    #[serde(default)]
    pub fixed: Coords,
    /// Names of the residuals that partition the slice; empty selects all.
    #[serde(default)]
    pub sets: Vec<String>,
}

impl SliceSpec {
    pub fn validate(&self) -> Result<()> {
        let names = self.family.coordinate_names();
        for a in [&self.x, &self.y] {
            if !names.contains(&a.name.as_str()) {
                return Err(Error::Config(format!("unknown axis {} (expected one of {names:?})", a.name)));
            }
            if a.n < MIN_RESOLUTION {
                return Err(Error::Config(format!("axis {} needs at least {MIN_RESOLUTION} points", a.name)));
            }
            if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
                return Err(Error::Config(format!("axis {} needs a finite range with min < max", a.name)));
            }
        }
        if self.x.name == self.y.name {
            return Err(Error::Config("axes must be distinct".into()));
        }
        for (k, v) in &self.fixed {
            if !names.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown fixed coordinate {k}")));
            }
            if k == &self.x.name || k == &self.y.name {
                return Err(Error::Config(format!("{k} is both fixed and free")));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("fixed coordinate"));
            }
        }
        Ok(())
    }

    pub fn coords(&self, x: f64, y: f64) -> Coords {
        let mut c = self.fixed.clone();
        c.insert(self.x.name.clone(), x);
        c.insert(self.y.name.clone(), y);
        c
    }

    fn select(&self, all: Vec<SetResidual>) -> Result<Vec<SetResidual>> {
        if self.sets.is_empty() {
            return Ok(all);
        }
        self.sets
            .iter()
            .map(|n| {
                all.iter()
                    .find(|r| &r.name == n)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("unknown set {n}")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: usize,
    /// Residual signs; `None` marks an undefined residual.
    pub sign_vector: Vec<Option<i8>>,
    pub cells: usize,
    /// A member cell near the region's centroid.
    pub representative: [f64; 2],
    /// True when some residual is undefined throughout the region.
    pub masked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub regions: [usize; 2],
    /// Midpoints of the cell edges separating the two regions, in scan order.
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atlas {
    pub spec: SliceSpec,
    pub set_names: Vec<String>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Residual values per cell, row-major with `x` fastest.
    pub values: Vec<Vec<f64>>,
    pub region_of: Vec<usize>,
    pub regions: Vec<Region>,
    pub boundaries: Vec<Boundary>,
}

fn signs(v: &[SetResidual]) -> Vec<Option<i8>> {
    v.iter().map(SetResidual::sign).collect()
}

/// Evaluates `f` on the grid and labels 4-connected components of equal sign vectors.
pub fn build_atlas_with<F>(spec: &SliceSpec, f: F) -> Result<Atlas>
where
    F: Fn(&Coords) -> Result<Vec<SetResidual>> + Sync,
{
    spec.validate()?;
    let (xs, ys) = (spec.x.values(), spec.y.values());
    let (nx, ny) = (xs.len(), ys.len());
    let cells: Vec<Vec<SetResidual>> = (0..nx * ny)
        .into_par_iter()
        .map(|k| spec.select(f(&spec.coords(xs[k % nx], ys[k / nx]))?))
        .collect::<Result<_>>()?;
    if cells[0].is_empty() {
        return Err(Error::Config("no residuals selected".into()));
    }
    let set_names: Vec<String> = cells[0].iter().map(|r| r.name.clone()).collect();
    let sv: Vec<Vec<Option<i8>>> = cells.iter().map(|c| signs(c)).collect();

    let mut region_of = vec![usize::MAX; nx * ny];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for start in 0..nx * ny {
        if region_of[start] != usize::MAX {
            continue;
        }
        let id = members.len();
        let mut list = vec![start];
        region_of[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % nx, k / nx);
            let mut nb = Vec::with_capacity(4);
            if i > 0 {
                nb.push(k - 1);
            }
            if i + 1 < nx {
                nb.push(k + 1);
            }
            if j > 0 {
                nb.push(k - nx);
            }
            if j + 1 < ny {
                nb.push(k + nx);
            }
            for m in nb {
                if region_of[m] == usize::MAX && sv[m] == sv[start] {
                    region_of[m] = id;
                    list.push(m);
                    queue.push_back(m);
                }
            }
        }
        members.push(list);
    }

    let regions = members
        .iter()
        .enumerate()
        .map(|(id, list)| {
            let n = list.len() as f64;
            let ci = list.iter().map(|k| (k % nx) as f64).sum::<f64>() / n;
            let cj = list.iter().map(|k| (k / nx) as f64).sum::<f64>() / n;
            let rep = *list
                .iter()
                .min_by(|a, b| {
                    let d = |k: usize| ((k % nx) as f64 - ci).powi(2) + ((k / nx) as f64 - cj).powi(2);
                    d(**a).total_cmp(&d(**b))
                })
                .unwrap();
            Region {
                id,
                sign_vector: sv[list[0]].clone(),
                cells: list.len(),
                representative: [xs[rep % nx], ys[rep / nx]],
                masked: sv[list[0]].iter().any(Option::is_none),
            }
        })
        .collect();

    let mut bmap: BTreeMap<(usize, usize), Vec<[f64; 2]>> = BTreeMap::new();
    for k in 0..nx * ny {
        let (i, j) = (k % nx, k / nx);
        let mut edge = |m: usize, p: [f64; 2]| {
            let (a, b) = (region_of[k], region_of[m]);
            if a != b {
                bmap.entry((a.min(b), a.max(b))).or_default().push(p);
            }
        };
        if i + 1 < nx {
            edge(k + 1, [0.5 * (xs[i] + xs[i + 1]), ys[j]]);
        }
        if j + 1 < ny {
            edge(k + nx, [xs[i], 0.5 * (ys[j] + ys[j + 1])]);
        }
    }
    let boundaries = bmap
        .into_iter()
        .map(|((a, b), points)| Boundary { regions: [a, b], points })
        .collect();

    Ok(Atlas {
        spec: spec.clone(),
        set_names,
        xs,
        ys,
        values: cells.iter().map(|c| c.iter().map(|r| r.value).collect()).collect(),
        region_of,
        regions,
        boundaries,
    })
}

pub fn build_atlas(spec: &SliceSpec) -> Result<Atlas> {
    build_atlas_with(spec, |c| spec.family.evaluate(c))
}

impl Atlas {
    /// Region of the grid cell nearest to `(x, y)`; `None` outside the slice.
    pub fn region_at(&self, x: f64, y: f64) -> Option<usize> {
        let (a, b) = (&self.spec.x, &self.spec.y);
        if x < a.min || x > a.max || y < b.min || y > b.max {
            return None;
        }
        let idx = |v: f64, ax: &Axis| (((v - ax.min) / (ax.max - ax.min)) * (ax.n - 1) as f64).round() as usize;
        Some(self.region_of[idx(y, b) * self.xs.len() + idx(x, a)])
    }

    /// Grid dump: `x,y,region` followed by one column per residual.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{},{},region,{}", self.spec.x.name, self.spec.y.name, self.set_names.join(","))?;
        let nx = self.xs.len();
        for (k, vals) in self.values.iter().enumerate() {
            let cols: Vec<String> = vals.iter().map(|v| fmt17(*v)).collect();
            writeln!(
                w,
                "{},{},{},{}",
                fmt17(self.xs[k % nx]),
                fmt17(self.ys[k / nx]),
                self.region_of[k],
                cols.join(",")
            )?;
        }
        Ok(())
    }
}

/// Settings for simulating region representatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyOptions {
    pub ic_box: f64,
    pub ic_grid: usize,
    pub t_max: f64,
    pub backward: bool,
    pub scan: Option<EquilibriumScan>,
    /// Only simulate regions that have an expectation.
    pub expected_only: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            ic_box: 0.5,
            ic_grid: 5,
            t_max: 2e3,
            backward: true,
            scan: None,
            expected_only: false,
        }
    }
}

/// Expected portrait for the region containing `point`. `None` fields are not checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExpectedPortrait {
    #[serde(default)]
    pub label: String,
    pub point: [f64; 2],
    #[serde(default)]
    pub equilibria: Option<usize>,
    #[serde(default)]
    pub attracting_equilibria: Option<usize>,
    #[serde(default)]
    pub stable_cycles: Option<usize>,
    #[serde(default)]
    pub unstable_cycles: Option<usize>,
}

impl ExpectedPortrait {
    pub fn mismatches(&self, p: &PortraitSummary) -> Vec<String> {
        let checks = [
            ("equilibria", self.equilibria, p.equilibria.len()),
            ("attracting equilibria", self.attracting_equilibria, p.attracting_equilibria()),
            ("stable cycles", self.stable_cycles, p.stable_cycles()),
            ("unstable cycles", self.unstable_cycles, p.unstable_cycles()),
        ];
        checks
            .iter()
            .filter_map(|(what, want, got)| match want {
                Some(w) if w != got => Some(format!("{what}: expected {w}, found {got}")),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerification {
    pub region: usize,
    pub point: [f64; 2],
    pub summary: Option<PortraitSummary>,
    pub error: Option<String>,
    pub expectation: Option<String>,
    /// `None` when no expectation applies.
    pub matched: Option<bool>,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub regions: Vec<RegionVerification>,
    /// Expectations whose point lies outside the slice.
    pub unplaced: Vec<String>,
}

impl VerifyReport {
    pub fn all_matched(&self) -> bool {
        self.unplaced.is_empty() && self.regions.iter().all(|r| r.matched != Some(false))
    }
}

/// Simulates each region's representative with `portrait` and compares it
/// with the expectation whose point falls in that region.
pub fn verify_atlas_with<P>(atlas: &Atlas, expected: &[ExpectedPortrait], only_expected: bool, portrait: P) -> VerifyReport
where
    P: Fn(&Coords) -> Result<PortraitSummary> + Sync,
{
    let mut by_region: BTreeMap<usize, &ExpectedPortrait> = BTreeMap::new();
    let mut unplaced = Vec::new();
    for e in expected {
        match atlas.region_at(e.point[0], e.point[1]) {
            Some(r) => {
                by_region.insert(r, e);
            }
            None => unplaced.push(e.label.clone()),
        }
    }
    let regions = atlas
        .regions
        .par_iter()
        .filter(|r| !only_expected || by_region.contains_key(&r.id))
        .map(|r| {
            let [x, y] = r.representative;
            let exp = by_region.get(&r.id);
            let (summary, error) = match portrait(&atlas.spec.coords(x, y)) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let mismatches = match (exp, &summary, &error) {
                (Some(e), Some(s), _) => e.mismatches(s),
                (Some(_), None, Some(err)) => vec![err.clone()],
                _ => Vec::new(),
            };
            RegionVerification {
                region: r.id,
                point: r.representative,
                matched: exp.map(|_| mismatches.is_empty()),
                expectation: exp.map(|e| e.label.clone()),
                summary,
                error,
                mismatches,
            }
        })
        .collect();
    VerifyReport { regions, unplaced }
}

pub fn verify_atlas(atlas: &Atlas, expected: &[ExpectedPortrait], opts: &VerifyOptions) -> VerifyReport {
    verify_atlas_with(atlas, expected, opts.expected_only, |c| atlas.spec.family.portrait(c, opts))
}
