//! Self-similar sets generated by increasing affine contractions.
//!
//! Every [`Ifs`] is stored normalised so that the convex hull of its attractor
//! is `[0, 1]`; placed copies carry their own `[lo, hi]` hull.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{SetError, SetResult};
use crate::num::{q, qf, to_f64, Q};

/// Depth limit for clip recursion and membership search.
const MAX_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Map {
    pub r: Q,
    pub t: Q,
}

#[derive(Clone, Debug)]
pub struct Ifs {
    maps: Vec<Map>,
    name: Option<String>,
    dim: f64,
    weights: Vec<f64>,
    exact_weights: Option<Vec<Q>>,
}

impl PartialEq for Ifs {
    fn eq(&self, other: &Ifs) -> bool {
        self.maps == other.maps
    }
}

impl Eq for Ifs {}

impl std::hash::Hash for Ifs {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.maps.hash(state)
    }
}

/// Solve `sum r_i^s = 1` by bisection.
pub fn similarity_dimension(ratios: &[f64]) -> SetResult<f64> {
    let f = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    if ratios.len() < 2 || f(1.0) > 1e-15 {
        return Err(SetError::InvalidIfs(format!(
            "no dimension in (0,1] for ratios {ratios:?}"
        )));
    }
    if ratios.windows(2).all(|w| w[0] == w[1]) {
        return Ok((ratios.len() as f64).ln() / (1.0 / ratios[0]).ln());
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl Ifs {
    /// Build from arbitrary maps `x -> r x + t` (0 < r < 1), returning the
    /// normalised system together with the hull `[lo, hi]` of the attractor.
    pub fn from_maps(maps: Vec<(Q, Q)>) -> SetResult<(Ifs, Q, Q)> {
        if maps.len() < 2 {
            return Err(SetError::InvalidIfs(
                "at least two maps are required".into(),
            ));
        }
        for (r, _) in &maps {
            if !r.is_positive() || *r >= Q::one() {
                return Err(SetError::InvalidIfs(format!("ratio {r} outside (0,1)")));
            }
        }
        let fixed: Vec<Q> = maps.iter().map(|(r, t)| t / (Q::one() - r)).collect();
        let lo = fixed.iter().min().unwrap().clone();
        let hi = fixed.iter().max().unwrap().clone();
        let width = &hi - &lo;
        let mut norm: Vec<Map> = maps
            .iter()
            .map(|(r, t)| Map {
                r: r.clone(),
                t: (t + r * &lo - &lo) / &width,
            })
            .collect();
        norm.sort_by(|a, b| a.t.cmp(&b.t));
        Ok((Ifs::normalised(norm, None)?, lo, hi))
    }

    fn normalised(maps: Vec<Map>, name: Option<String>) -> SetResult<Ifs> {
        for w in maps.windows(2) {
            if &w[0].t + &w[0].r > w[1].t {
                return Err(SetError::InvalidIfs("first-level pieces overlap".into()));
            }
        }
        let ratios: Vec<f64> = maps.iter().map(|m| to_f64(&m.r)).collect();
        let dim = similarity_dimension(&ratios)?;
        let equal = maps.windows(2).all(|w| w[0].r == w[1].r);
        let exact_weights = equal.then(|| vec![qf(1, maps.len() as i64); maps.len()]);
        let weights = match &exact_weights {
            Some(w) => w.iter().map(to_f64).collect(),
            None => ratios.iter().map(|r| r.powf(dim)).collect(),
        };
        Ok(Ifs {
            maps,
            name,
            dim,
            weights,
            exact_weights,
        })
    }

    pub fn preset(name: &str) -> SetResult<Ifs> {
        let two = |r: Q| {
            vec![
                Map {
                    r: r.clone(),
                    t: Q::zero(),
                },
                Map {
                    t: Q::one() - &r,
                    r,
                },
            ]
        };
        let maps = match name {
            "cantor3" => two(qf(1, 3)),
            "cantor4" => two(qf(1, 4)),
            "cantor8" => two(qf(1, 8)),
            "cantor5" => vec![
                Map {
                    r: qf(1, 5),
                    t: q(0),
                },
                Map {
                    r: qf(1, 5),
                    t: qf(2, 5),
                },
                Map {
                    r: qf(1, 5),
                    t: qf(4, 5),
                },
            ],
            "skew" => vec![
                Map {
                    r: qf(1, 2),
                    t: q(0),
                },
                Map {
                    r: qf(1, 4),
                    t: qf(3, 4),
                },
            ],
            _ => return Err(SetError::InvalidIfs(format!("unknown preset '{name}'"))),
        };
        Ifs::normalised(maps, Some(name.to_string()))
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["cantor3", "cantor4", "cantor5", "cantor8", "skew"]
    }

    pub fn maps(&self) -> &[Map] {
        &self.maps
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> f64 {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mean of the natural self-similar probability measure on the
    /// normalised attractor: `m = sum w_i t_i / (1 - sum w_i r_i)`.
    pub fn mean(&self) -> f64 {
        if let Some(m) = self.mean_exact() {
            return to_f64(&m);
        }
        let num: f64 = self
            .maps
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| w * to_f64(&m.t))
            .sum();
        let den: f64 = 1.0
            - self
                .maps
                .iter()
                .zip(&self.weights)
                .map(|(m, w)| w * to_f64(&m.r))
                .sum::<f64>();
        num / den
    }

    /// Exact mean when all weights are rational (equal ratios).
    pub fn mean_exact(&self) -> Option<Q> {
        let w = self.exact_weights.as_ref()?;
        let num: Q = self.maps.iter().zip(w).map(|(m, w)| w * &m.t).sum();
        let den: Q = Q::one() - self.maps.iter().zip(w).map(|(m, w)| w * &m.r).sum::<Q>();
        Some(num / den)
    }

    /// Mirror image under `u -> 1 - u`.
    pub fn reflect(&self) -> Ifs {
        let mut maps: Vec<Map> = self
            .maps
            .iter()
            .map(|m| Map {
                r: m.r.clone(),
                t: Q::one() - &m.r - &m.t,
            })
            .collect();
        maps.sort_by(|a, b| a.t.cmp(&b.t));
        let symmetric = maps == self.maps;
        let name = self
            .name
            .clone()
            .map(|n| if symmetric { n } else { format!("{n}~") });
        let mut out = Ifs::normalised(maps, None).expect("reflection preserves validity");
        out.name = name;
        out
    }

    /// DSL-style description.
    pub fn describe(&self) -> String {
        match &self.name {
            Some(n) if !n.ends_with('~') => n.clone(),
            _ => {
                let parts: Vec<String> = self
                    .maps
                    .iter()
                    .map(|m| format!("{}:{}", m.r, m.t))
                    .collect();
                format!("maps {}", parts.join(" "))
            }
        }
    }

    /// Whether normalised `u` lies in the attractor. `None` when the search
    /// does not settle within the depth limit.
    pub fn contains(&self, u: &Q) -> Option<bool> {
        if u.is_negative() || *u > Q::one() {
            return Some(false);
        }
        let mut stack = HashSet::new();
        let mut done = HashMap::new();
        self.contains_rec(u.clone(), &mut stack, &mut done)
    }

    fn contains_rec(
        &self,
        u: Q,
        stack: &mut HashSet<Q>,
        done: &mut HashMap<Q, bool>,
    ) -> Option<bool> {
        if u.is_zero() || u.is_one() {
            return Some(true);
        }
        if let Some(&v) = done.get(&u) {
            return Some(v);
        }
        if stack.contains(&u) {
            // A cycle of maps gives an infinite address.
            return Some(true);
        }
        if stack.len() > MAX_DEPTH {
            return None;
        }
        stack.insert(u.clone());
        let mut undecided = false;
        let mut found = false;
        for m in &self.maps {
            if u >= m.t && u <= &m.t + &m.r {
                match self.contains_rec((&u - &m.t) / &m.r, stack, done) {
                    Some(true) => {
                        found = true;
                        break;
                    }
                    Some(false) => {}
                    None => undecided = true,
                }
            }
        }
        stack.remove(&u);
        if found {
            done.insert(u, true);
            Some(true)
        } else if undecided {
            None
        } else {
            done.insert(u, false);
            Some(false)
        }
    }

    /// Split the normalised attractor at `u`: the parts in `[0, u]` and in
    /// `[u, 1]`, each a list of sub-cylinders `(lo, hi)` where `lo == hi`
    /// denotes a single point.
    pub fn split(&self, u: &Q) -> SetResult<(Vec<(Q, Q)>, Vec<(Q, Q)>)> {
        let mut seen = HashSet::new();
        self.split_rec(u, &mut seen, 0)
    }

    fn split_rec(
        &self,
        u: &Q,
        seen: &mut HashSet<Q>,
        depth: usize,
    ) -> SetResult<(Vec<(Q, Q)>, Vec<(Q, Q)>)> {
        let whole = (Q::zero(), Q::one());
        if *u <= Q::zero() {
            let left = if u.is_zero() {
                vec![(Q::zero(), Q::zero())]
            } else {
                vec![]
            };
            return Ok((left, vec![whole]));
        }
        if *u >= Q::one() {
            let right = if u.is_one() {
                vec![(Q::one(), Q::one())]
            } else {
                vec![]
            };
            return Ok((vec![whole], right));
        }
        if depth > MAX_DEPTH || !seen.insert(u.clone()) {
            return Err(SetError::UnsupportedClip(format!(
                "clip point lies inside the attractor of {}",
                self.describe()
            )));
        }
        let cyl = |m: &Map| (m.t.clone(), &m.t + &m.r);
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut inside: Option<&Map> = None;
        for m in &self.maps {
            let (a, b) = cyl(m);
            if b < *u {
                left.push((a, b));
            } else if a > *u {
                right.push((a, b));
            } else if a == *u {
                left.push((a.clone(), a.clone()));
                right.push((a, b));
            } else if b == *u {
                left.push((a, b.clone()));
                right.push((b.clone(), b));
            } else {
                inside = Some(m);
            }
        }
        if let Some(m) = inside {
            let (l, r) = self.split_rec(&((u - &m.t) / &m.r), seen, depth + 1)?;
            let img = |(a, b): (Q, Q)| (&m.t + &m.r * a, &m.t + &m.r * b);
            left.extend(l.into_iter().map(img));
            right.extend(r.into_iter().map(img));
        }
        left.sort();
        right.sort();
        dedup_points(&mut left);
        dedup_points(&mut right);
        Ok((left, right))
    }
}

/// Drop single points already covered by a neighbouring cylinder.
fn dedup_points(v: &mut Vec<(Q, Q)>) {
    let cyl: Vec<(Q, Q)> = v.iter().filter(|(a, b)| a < b).cloned().collect();
    v.retain(|(a, b)| a < b || !cyl.iter().any(|(c, d)| c <= a && a <= d));
    v.dedup();
}

impl fmt::Display for Ifs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}
