//! Topologies, loop-free path enumeration, delay vectors and the Bernoulli
//! path availability model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::combin::{binom, binom_int, to_f64, Ratio};
use crate::error::{invalid, Error, Result};

/// Hop cap used when the caller does not give one.
pub const DEFAULT_MAX_HOPS: usize = 10;

/// A directed link bundle: `multiplicity` parallel channels (wavelengths)
/// from `tail` to `head`, each traversal costing `delay` tu.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Link {
    pub tail: usize,
    pub head: usize,
    pub multiplicity: u32,
    pub delay: u64,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiGraph {
    nodes: BTreeSet<usize>,
    links: Vec<Link>,
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: usize) {
        self.nodes.insert(id);
    }

    pub fn add_link(&mut self, link: Link) -> Result<()> {
        for id in [link.tail, link.head] {
            if !self.nodes.contains(&id) {
                return Err(Error::UnknownNode(id));
            }
        }
        if link.multiplicity == 0 {
            return Err(invalid("link multiplicity must be at least 1"));
        }
        self.links.push(link);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().copied()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn has_node(&self, id: usize) -> bool {
        self.nodes.contains(&id)
    }

    /// The 14-node, 21-fiber NSFNET, each fiber carrying 10 wavelengths with
    /// a delay of 1 tu. Fibers are oriented so that the graph is acyclic, as
    /// seen from node 0 towards node 5.
    pub fn nsfnet() -> Self {
        const FIBERS: [(usize, usize); 21] = [
            (0, 1),
            (0, 2),
            (0, 7),
            (1, 2),
            (1, 3),
            (2, 5),
            (3, 4),
            (3, 10),
            (4, 5),
            (4, 6),
            (6, 7),
            (7, 8),
            (8, 9),
            (8, 12),
            (9, 5),
            (10, 11),
            (10, 12),
            (11, 8),
            (11, 13),
            (12, 13),
            (13, 5),
        ];
        let mut g = Self::new();
        for id in 0..14 {
            g.add_node(id);
        }
        for (tail, head) in FIBERS {
            g.add_link(Link {
                tail,
                head,
                multiplicity: 10,
                delay: 1,
            })
            .expect("builtin nodes exist");
        }
        g
    }

    /// Resolves a builtin name (`nsfnet`) or parses topology text.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "nsfnet" => Some(Self::nsfnet()),
            _ => None,
        }
    }

    /// Parses the line-based topology format:
    ///
    /// ```text
    /// # comment
    /// node <id>
    /// link <tail> <head> <multiplicity> <delay_tu>
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::TopologyParse {
                line: line_no,
                message,
            };
            let mut tokens = line.split_whitespace();
            let keyword = tokens.next().expect("line is not empty");
            let fields: Vec<&str> = tokens.collect();
            let num = |idx: usize, what: &str| -> Result<u64> {
                fields[idx]
                    .parse::<u64>()
                    .map_err(|_| err(format!("{what} {:?} is not a nonnegative integer", fields[idx])))
            };
            match keyword {
                "node" => {
                    if fields.len() != 1 {
                        return Err(err(format!("`node` takes 1 field, got {}", fields.len())));
                    }
                    let id = usize::try_from(num(0, "node id")?)
                        .map_err(|_| err("node id out of range".into()))?;
                    g.add_node(id);
                }
                "link" => {
                    if fields.len() != 4 {
                        return Err(err(format!("`link` takes 4 fields, got {}", fields.len())));
                    }
                    let tail = usize::try_from(num(0, "tail")?)
                        .map_err(|_| err("tail out of range".into()))?;
                    let head = usize::try_from(num(1, "head")?)
                        .map_err(|_| err("head out of range".into()))?;
                    let multiplicity = u32::try_from(num(2, "multiplicity")?)
                        .map_err(|_| err("multiplicity out of range".into()))?;
                    let delay = num(3, "delay")?;
                    g.add_link(Link {
                        tail,
                        head,
                        multiplicity,
                        delay,
                    })
                    .map_err(|e| err(e.to_string()))?;
                }
                other => return Err(err(format!("unknown keyword {other:?}"))),
            }
        }
        Ok(g)
    }

    /// Writes the graph back in the text format accepted by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            s.push_str(&format!("node {n}\n"));
        }
        for l in &self.links {
            s.push_str(&format!(
                "link {} {} {} {}\n",
                l.tail, l.head, l.multiplicity, l.delay
            ));
        }
        s
    }
}

/// One loop-free fiber route between a source and a destination.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Route {
    pub nodes: Vec<usize>,
    /// Indices into [`MultiGraph::links`].
    pub links: Vec<usize>,
    pub delay: u64,
    /// Wavelength-continuous channels on this route: the smallest link
    /// multiplicity along it.
    pub wavelengths: u32,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.links.len()
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", s.join("-"))
    }
}

/// Routes from `src` to `dst`, sorted by delay, then node sequence, then
/// link indices.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PathCatalog {
    pub src: usize,
    pub dst: usize,
    pub routes: Vec<Route>,
}

impl PathCatalog {
    /// One entry per fiber route.
    pub fn reduced(&self) -> DelayVector {
        DelayVector::new(self.routes.iter().map(|r| r.delay).collect())
            .expect("catalog is never empty")
    }

    /// One entry per wavelength path.
    pub fn expanded(&self) -> DelayVector {
        DelayVector::new(
            self.routes
                .iter()
                .flat_map(|r| std::iter::repeat_n(r.delay, r.wavelengths as usize))
                .collect(),
        )
        .expect("catalog is never empty")
    }
}

/// Exhaustive DFS over simple directed paths with at most `max_hops` links.
pub fn enumerate_paths(g: &MultiGraph, src: usize, dst: usize, max_hops: usize) -> Result<PathCatalog> {
    if src == dst {
        return Err(invalid("source and destination must differ"));
    }
    if max_hops == 0 {
        return Err(invalid("max hops must be at least 1"));
    }
    for id in [src, dst] {
        if !g.has_node(id) {
            return Err(Error::UnknownNode(id));
        }
    }
    let mut out_links: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, l) in g.links().iter().enumerate() {
        out_links.entry(l.tail).or_default().push(i);
    }

    struct Dfs<'a> {
        g: &'a MultiGraph,
        out_links: &'a BTreeMap<usize, Vec<usize>>,
        dst: usize,
        max_hops: usize,
        nodes: Vec<usize>,
        links: Vec<usize>,
        on_path: BTreeSet<usize>,
        found: Vec<Route>,
    }

    impl Dfs<'_> {
        fn walk(&mut self, at: usize) {
            if at == self.dst {
                let ls = self.g.links();
                self.found.push(Route {
                    nodes: self.nodes.clone(),
                    links: self.links.clone(),
                    delay: self.links.iter().map(|&i| ls[i].delay).sum(),
                    wavelengths: self.links.iter().map(|&i| ls[i].multiplicity).min().unwrap_or(0),
                });
                return;
            }
            if self.links.len() == self.max_hops {
                return;
            }
            let Some(outs) = self.out_links.get(&at) else {
                return;
            };
            for &li in outs {
                let next = self.g.links()[li].head;
                if self.on_path.contains(&next) {
                    continue;
                }
                self.on_path.insert(next);
                self.nodes.push(next);
                self.links.push(li);
                self.walk(next);
                self.links.pop();
                self.nodes.pop();
                self.on_path.remove(&next);
            }
        }
    }

    let mut dfs = Dfs {
        g,
        out_links: &out_links,
        dst,
        max_hops,
        nodes: vec![src],
        links: Vec::new(),
        on_path: BTreeSet::from([src]),
        found: Vec::new(),
    };
    dfs.walk(src);
    let mut routes = dfs.found;
    if routes.is_empty() {
        return Err(Error::NoPath { src, dst });
    }
    routes.sort_by(|a, b| {
        a.delay
            .cmp(&b.delay)
            .then_with(|| a.nodes.cmp(&b.nodes))
            .then_with(|| a.links.cmp(&b.links))
    });
    Ok(PathCatalog { src, dst, routes })
}

/// Ascending path delays `d_1 <= ... <= d_N` in tu.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct DelayVector(Vec<u64>);

impl DelayVector {
    pub fn new(mut delays: Vec<u64>) -> Result<Self> {
        if delays.is_empty() {
            return Err(invalid("delay vector must contain at least one path"));
        }
        delays.sort_unstable();
        Ok(Self(delays))
    }

    /// `d_l = l` for `l = 1..=paths`.
    pub fn abstract_network(paths: usize) -> Result<Self> {
        if paths == 0 {
            return Err(invalid("abstract network needs at least one path"));
        }
        Self::new((1..=paths as u64).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// 1-based access, `d(1)` is the smallest delay.
    pub fn d(&self, l: usize) -> u64 {
        self.0[l - 1]
    }

    pub fn min(&self) -> u64 {
        self.0[0]
    }

    pub fn max(&self) -> u64 {
        self.0[self.0.len() - 1]
    }

    /// Paths sharing the minimal delay.
    pub fn d_min_count(&self) -> usize {
        self.0.iter().take_while(|&&d| d == self.min()).count()
    }

    /// Paths sharing the maximal delay.
    pub fn d_max_count(&self) -> usize {
        self.0.iter().rev().take_while(|&&d| d == self.max()).count()
    }

    /// Largest differential delay seen by a decoder that ignores the `r`
    /// slowest of its paths: `d_{N-r} - d_1`.
    pub fn tau_up(&self, r: usize) -> Result<u64> {
        if r >= self.len() {
            return Err(invalid(format!("r={r} leaves no path out of N={}", self.len())));
        }
        Ok(self.d(self.len() - r) - self.min())
    }

    /// Keeps only the given 0-based positions.
    pub fn subset(&self, positions: &[usize]) -> Result<Self> {
        Self::new(positions.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for DelayVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for DelayVector {
    type Err = Error;

    /// Comma or whitespace separated delays, optionally in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let delays = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| invalid(format!("delay {t:?} is not a nonnegative integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(delays)
    }
}

/// Each of `paths` existing paths is independently blocked with probability
/// `blocking`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct AvailabilityModel {
    pub paths: usize,
    pub blocking: f64,
}

impl AvailabilityModel {
    pub fn new(paths: usize, blocking: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&blocking) {
            return Err(invalid(format!("blocking probability {blocking} outside [0, 1]")));
        }
        Ok(Self { paths, blocking })
    }

    pub fn setup_probability(&self) -> f64 {
        1.0 - self.blocking
    }

    /// `Pr(N = j)`, binomial in the number of available paths.
    pub fn pmf(&self, j: usize) -> f64 {
        if j > self.paths {
            return 0.0;
        }
        let c = to_f64(&Ratio::from_integer(binom_int(self.paths as i64, j as i64)));
        c * self.setup_probability().powi(j as i32) * self.blocking.powi((self.paths - j) as i32)
    }

    /// `B(n)`: probability that fewer than `n` paths are available.
    pub fn request_blocking(&self, n: usize) -> Result<f64> {
        self.check_request(n)?;
        Ok((0..n).map(|j| self.pmf(j)).sum::<f64>().min(1.0))
    }

    pub fn mean_available(&self) -> f64 {
        self.paths as f64 * self.setup_probability()
    }

    /// `E{N | N >= n}`.
    pub fn mean_available_given_success(&self, n: usize) -> Result<f64> {
        self.check_request(n)?;
        let tail: f64 = (n..=self.paths).map(|j| self.pmf(j)).sum();
        if tail <= 0.0 {
            return Err(Error::DegenerateConditioning);
        }
        let weighted: f64 = (n..=self.paths).map(|j| j as f64 * self.pmf(j)).sum();
        Ok(weighted / tail)
    }

    /// Indices of the paths that could be set up in one draw.
    pub fn sample_available<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let p = self.setup_probability();
        (0..self.paths).filter(|_| rng.random_bool(p)).collect()
    }

    fn check_request(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.paths {
            return Err(invalid(format!(
                "requested {n} paths out of {} existing",
                self.paths
            )));
        }
        Ok(())
    }
}

/// Exact `Pr(N = j)` for a rational blocking probability.
pub fn availability_pmf_exact(paths: usize, blocking: &Ratio, j: usize) -> Ratio {
    if j > paths {
        return Ratio::zero();
    }
    let setup = Ratio::one() - blocking;
    Ratio::from_integer(binom(paths as i64, j as i64).into())
        * num::pow(setup, j)
        * num::pow(blocking.clone(), paths - j)
}
