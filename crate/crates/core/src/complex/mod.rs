//! Combinatorics of an ordered ideal triangulation and of the truncated
//! tetrahedra it decomposes into: long-edge classes, short edges, cusp
//! triangulations, peripheral curves and spanning trees.

mod census;
mod io;
mod perm;

use std::collections::VecDeque;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;

pub use census::{
    census_figure_eight, FIGURE_EIGHT_L1, FIGURE_EIGHT_L2, FIGURE_EIGHT_SHORT_LABELS,
};
pub use io::{load_complex, save_complex, FORMAT_VERSION};
pub use perm::Perm;

use crate::linalg::solve_rational;
use crate::monomial::Monomial;
use crate::{Error, Result};

/// The six tetrahedron edges `(a, b)` with `a < b`, in index order.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    EDGES
        .iter()
        .position(|&e| e == (a, b))
        .expect("distinct vertices")
}

/// The vertex of `{0,1,2,3}` not in `xs`.
pub fn missing(xs: [usize; 3]) -> usize {
    6 - xs[0] - xs[1] - xs[2]
}

/// The three vertices other than `v`, increasing.
pub fn others(v: usize) -> [usize; 3] {
    let mut o = [0; 3];
    let mut k = 0;
    for x in 0..4 {
        if x != v {
            o[k] = x;
            k += 1;
        }
    }
    o
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceGluing {
    pub tet: usize,
    pub face: usize,
    pub nbr_tet: usize,
    pub nbr_face: usize,
    pub perm: Perm,
}

/// Raw face pairings. Each face may be listed once; the reverse gluing is
/// implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacePairingData {
    pub tetrahedron_count: usize,
    pub gluings: Vec<FaceGluing>,
}

impl FacePairingData {
    /// Builds gluings from unordered face pairs using the order-preserving
    /// permutations.
    pub fn from_face_pairs(
        tetrahedron_count: usize,
        pairs: &[((usize, usize), (usize, usize))],
    ) -> Self {
        let gluings = pairs
            .iter()
            .map(|&((tet, face), (nbr_tet, nbr_face))| FaceGluing {
                tet,
                face,
                nbr_tet,
                nbr_face,
                perm: Perm::ordered(face, nbr_face),
            })
            .collect();
        FacePairingData {
            tetrahedron_count,
            gluings,
        }
    }

    /// Validated neighbor table `table[t][f] = (t', perm)`.
    fn table(&self) -> Result<Vec<[(usize, Perm); 4]>> {
        let n = self.tetrahedron_count;
        if n == 0 {
            return Err(Error::Malformed("no tetrahedra".into()));
        }
        let mut table: Vec<[Option<(usize, Perm)>; 4]> = vec![[None; 4]; n];
        for g in &self.gluings {
            let invalid = |reason: &str| Error::InvalidGluing {
                tet: g.tet,
                face: g.face,
                reason: reason.into(),
            };
            if g.tet >= n || g.nbr_tet >= n || g.face > 3 || g.nbr_face > 3 {
                return Err(invalid("index out of range"));
            }
            if g.perm.apply(g.face) != g.nbr_face {
                return Err(invalid("permutation does not send the face to its partner"));
            }
            if g.tet == g.nbr_tet && g.face == g.nbr_face {
                return Err(invalid("face glued to itself"));
            }
            for (t, f, entry) in [
                (g.tet, g.face, (g.nbr_tet, g.perm)),
                (g.nbr_tet, g.nbr_face, (g.tet, g.perm.inverse())),
            ] {
                match table[t][f] {
                    Some(e) if e != entry => {
                        return Err(Error::NonInvolutiveGluing { tet: t, face: f })
                    }
                    _ => table[t][f] = Some(entry),
                }
            }
        }
        let mut out = Vec::with_capacity(n);
        for (t, row) in table.iter().enumerate() {
            let mut r = [(0, Perm::IDENTITY); 4];
            for f in 0..4 {
                r[f] = row[f].ok_or(Error::UngluedFace { tet: t, face: f })?;
            }
            out.push(r);
        }
        for t in 0..n {
            for f in 0..4 {
                let (t2, p) = out[t][f];
                let (back, q) = out[t2][p.apply(f)];
                if back != t || q.compose(&p) != Perm::IDENTITY {
                    return Err(Error::NonInvolutiveGluing { tet: t, face: f });
                }
                let img = others(f).map(|x| p.apply(x));
                if !(img[0] < img[1] && img[1] < img[2]) {
                    return Err(Error::InconsistentOrdering { tet: t, face: f });
                }
            }
        }
        Ok(out)
    }
}

/// A tetrahedron edge `a → b` (`a < b`) of tetrahedron `tet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LongEdge {
    pub tet: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongEdgeClass {
    /// Sorted; the first member is the representative.
    pub members: Vec<LongEdge>,
    /// Orientation of each member relative to the representative.
    pub signs: Vec<i8>,
}

/// A slot `(tet, v, a, b)`: the short edge at truncated vertex `v` running
/// from the corner on edge `va` to the corner on edge `vb`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShortSlot {
    pub tet: usize,
    pub v: usize,
    pub a: usize,
    pub b: usize,
}

impl ShortSlot {
    pub fn reversed(self) -> ShortSlot {
        ShortSlot {
            a: self.b,
            b: self.a,
            ..self
        }
    }
}

/// An oriented short-edge orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShortEdgeRef {
    pub edge: usize,
    pub forward: bool,
}

impl ShortEdgeRef {
    pub fn reversed(self) -> ShortEdgeRef {
        ShortEdgeRef {
            forward: !self.forward,
            ..self
        }
    }

    /// 1-based signed id as used by the file format.
    pub fn to_signed(self) -> i32 {
        let id = self.edge as i32 + 1;
        if self.forward {
            id
        } else {
            -id
        }
    }

    pub fn from_signed(id: i32) -> Option<ShortEdgeRef> {
        if id == 0 {
            return None;
        }
        Some(ShortEdgeRef {
            edge: id.unsigned_abs() as usize - 1,
            forward: id > 0,
        })
    }

    pub fn sign(self) -> i64 {
        if self.forward {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortEdge {
    /// The two slots of the orbit, in the forward orientation.
    pub slots: Vec<ShortSlot>,
    pub tail: usize,
    pub head: usize,
    pub cusp: usize,
}

/// Spanning tree of a cusp's 1-skeleton, rooted at its least vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    /// For each vertex of the cusp (global ids), the edge from its parent.
    parent: Vec<Option<ShortEdgeRef>>,
    pub edges: Vec<usize>,
}

impl SpanningTree {
    pub fn contains(&self, edge: usize) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }

    /// Tree path from the root to `v`.
    pub fn path_from_root(&self, cx: &TruncatedComplex, mut v: usize) -> Vec<ShortEdgeRef> {
        let mut path = Vec::new();
        while let Some(e) = self.parent[v] {
            path.push(e);
            v = cx.tail(e);
        }
        path.reverse();
        path
    }

    /// Tree path from `u` to `v`.
    pub fn path_between(&self, cx: &TruncatedComplex, u: usize, v: usize) -> Vec<ShortEdgeRef> {
        let mut p = inverse_path(&self.path_from_root(cx, u));
        p.extend(self.path_from_root(cx, v));
        reduce_path(&p)
    }

    /// The closed path `root → tail(e) → head(e) → root`.
    pub fn fundamental_cycle(&self, cx: &TruncatedComplex, e: ShortEdgeRef) -> Vec<ShortEdgeRef> {
        let mut p = self.path_from_root(cx, cx.tail(e));
        p.push(e);
        p.extend(inverse_path(&self.path_from_root(cx, cx.head(e))));
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cusp {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// Truncated vertices `(tet, v)` forming the cusp triangles.
    pub triangles: Vec<(usize, usize)>,
    pub meridian: Vec<ShortEdgeRef>,
    pub longitude: Vec<ShortEdgeRef>,
}

impl Cusp {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }
}

/// Peripheral curves of one cusp, as signed short-edge ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PeripheralPaths {
    pub meridian: Vec<i32>,
    pub longitude: Vec<i32>,
}

/// Immutable combinatorial data of a triangulated cusped manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedComplex {
    pub name: String,
    gluing: Vec<[(usize, Perm); 4]>,
    orientation: Vec<i8>,
    classes: Vec<LongEdgeClass>,
    /// `edge_class[t][edge_index]` = (class, sign).
    edge_class: Vec<[(usize, i8); 6]>,
    corner_vertex: Vec<[[usize; 4]; 4]>,
    vertex_cusp: Vec<usize>,
    short_edges: Vec<ShortEdge>,
    short_of: Vec<[[[ShortEdgeRef; 4]; 4]; 4]>,
    cusps: Vec<Cusp>,
    trees: Vec<SpanningTree>,
    /// Exponents of `(M_j, L_j)` in the coordinate cocycle of each short edge.
    coords: Vec<(i64, i64)>,
    sigma_template: Option<Vec<Monomial>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

pub fn inverse_path(p: &[ShortEdgeRef]) -> Vec<ShortEdgeRef> {
    p.iter().rev().map(|e| e.reversed()).collect()
}

/// Free reduction (cancels adjacent `e e⁻¹`), not cyclic.
pub fn reduce_path(p: &[ShortEdgeRef]) -> Vec<ShortEdgeRef> {
    let mut out: Vec<ShortEdgeRef> = Vec::with_capacity(p.len());
    for &e in p {
        if out.last() == Some(&e.reversed()) {
            out.pop();
        } else {
            out.push(e);
        }
    }
    out
}

/// Free reduction followed by cancellation across the cyclic seam.
pub fn reduce_cyclic(p: &[ShortEdgeRef]) -> Vec<ShortEdgeRef> {
    let mut out = reduce_path(p);
    while out.len() >= 2 && out[0] == out[out.len() - 1].reversed() {
        out.pop();
        out.remove(0);
    }
    out
}

/// Builds and validates the complex.
pub fn build_complex(
    gluing: &FacePairingData,
    peripheral: &[PeripheralPaths],
    orientation_signs: Option<&[i8]>,
) -> Result<TruncatedComplex> {
    let table = gluing.table()?;
    let n = table.len();

    // Long edges.
    let mut uf = UnionFind::new(6 * n);
    for t in 0..n {
        for f in 0..4 {
            let (t2, p) = table[t][f];
            for (k, &(a, b)) in EDGES.iter().enumerate() {
                if a != f && b != f {
                    uf.union(6 * t + k, 6 * t2 + edge_index(p.apply(a), p.apply(b)));
                }
            }
        }
    }
    let mut class_of_root = vec![usize::MAX; 6 * n];
    let mut classes: Vec<LongEdgeClass> = Vec::new();
    let mut edge_class = vec![[(0usize, 1i8); 6]; n];
    for t in 0..n {
        for (k, &(a, b)) in EDGES.iter().enumerate() {
            let r = uf.find(6 * t + k);
            if class_of_root[r] == usize::MAX {
                class_of_root[r] = classes.len();
                classes.push(LongEdgeClass {
                    members: Vec::new(),
                    signs: Vec::new(),
                });
            }
            let c = class_of_root[r];
            classes[c].members.push(LongEdge { tet: t, a, b });
            // Ordered gluings preserve a < b, so every member agrees with
            // the representative.
            classes[c].signs.push(1);
            edge_class[t][k] = (c, 1);
        }
    }

    // Corners (t, v, w): at truncated vertex v, on edge vw.
    let corner = |t: usize, v: usize, w: usize| 16 * t + 4 * v + w;
    let mut cuf = UnionFind::new(16 * n);
    for t in 0..n {
        for f in 0..4 {
            let (t2, p) = table[t][f];
            for v in 0..4 {
                for w in 0..4 {
                    if v != w && v != f && w != f {
                        cuf.union(corner(t, v, w), corner(t2, p.apply(v), p.apply(w)));
                    }
                }
            }
        }
    }
    let mut vertex_of_root = vec![usize::MAX; 16 * n];
    let mut corner_vertex = vec![[[usize::MAX; 4]; 4]; n];
    let mut vertex_count = 0;
    for t in 0..n {
        for v in 0..4 {
            for w in 0..4 {
                if v == w {
                    continue;
                }
                let r = cuf.find(corner(t, v, w));
                if vertex_of_root[r] == usize::MAX {
                    vertex_of_root[r] = vertex_count;
                    vertex_count += 1;
                }
                corner_vertex[t][v][w] = vertex_of_root[r];
            }
        }
    }

    // Short edges: slots with a < b, glued across the face opposite the
    // fourth vertex.
    let slot = |t: usize, v: usize, a: usize, b: usize| 64 * t + 16 * v + 4 * a + b;
    let mut suf = UnionFind::new(64 * n);
    for t in 0..n {
        for v in 0..4 {
            let o = others(v);
            for (a, b) in [(o[0], o[1]), (o[0], o[2]), (o[1], o[2])] {
                let d = missing([v, a, b]);
                let (t2, p) = table[t][d];
                suf.union(
                    slot(t, v, a, b),
                    slot(t2, p.apply(v), p.apply(a), p.apply(b)),
                );
            }
        }
    }
    let mut short_of_root = vec![usize::MAX; 64 * n];
    let mut short_edges: Vec<ShortEdge> = Vec::new();
    let null = ShortEdgeRef {
        edge: usize::MAX,
        forward: true,
    };
    let mut short_of = vec![[[[null; 4]; 4]; 4]; n];
    for t in 0..n {
        for v in 0..4 {
            let o = others(v);
            for (a, b) in [(o[0], o[1]), (o[0], o[2]), (o[1], o[2])] {
                let r = suf.find(slot(t, v, a, b));
                if short_of_root[r] == usize::MAX {
                    short_of_root[r] = short_edges.len();
                    short_edges.push(ShortEdge {
                        slots: Vec::new(),
                        tail: corner_vertex[t][v][a],
                        head: corner_vertex[t][v][b],
                        cusp: usize::MAX,
                    });
                }
                let e = short_of_root[r];
                short_edges[e].slots.push(ShortSlot { tet: t, v, a, b });
                short_of[t][v][a][b] = ShortEdgeRef {
                    edge: e,
                    forward: true,
                };
                short_of[t][v][b][a] = ShortEdgeRef {
                    edge: e,
                    forward: false,
                };
            }
        }
    }

    // Cusps as connected components of the cusp graph.
    let mut vuf = UnionFind::new(vertex_count);
    for e in &short_edges {
        vuf.union(e.tail, e.head);
    }
    let mut cusp_of_root = vec![usize::MAX; vertex_count];
    let mut vertex_cusp = vec![0; vertex_count];
    let mut cusps: Vec<Cusp> = Vec::new();
    for v in 0..vertex_count {
        let r = vuf.find(v);
        if cusp_of_root[r] == usize::MAX {
            cusp_of_root[r] = cusps.len();
            cusps.push(Cusp {
                vertices: Vec::new(),
                edges: Vec::new(),
                triangles: Vec::new(),
                meridian: Vec::new(),
                longitude: Vec::new(),
            });
        }
        vertex_cusp[v] = cusp_of_root[r];
        cusps[cusp_of_root[r]].vertices.push(v);
    }
    for (i, e) in short_edges.iter_mut().enumerate() {
        e.cusp = vertex_cusp[e.tail];
        cusps[e.cusp].edges.push(i);
    }
    for t in 0..n {
        for v in 0..4 {
            let w = others(v)[0];
            cusps[vertex_cusp[corner_vertex[t][v][w]]]
                .triangles
                .push((t, v));
        }
    }
    for (j, c) in cusps.iter().enumerate() {
        let chi = c.euler_characteristic();
        if chi != 0 || 2 * c.edges.len() != 3 * c.triangles.len() {
            return Err(Error::NotTorus {
                cusp: j,
                euler: chi,
            });
        }
    }

    let orientation = orient(&table, orientation_signs)?;

    let mut cx = TruncatedComplex {
        name: String::new(),
        gluing: table,
        orientation,
        classes,
        edge_class,
        corner_vertex,
        vertex_cusp,
        short_edges,
        short_of,
        cusps,
        trees: Vec::new(),
        coords: Vec::new(),
        sigma_template: None,
    };
    cx.check_cusp_orientation()?;

    if peripheral.len() != cx.cusps.len() {
        return Err(Error::Malformed(format!(
            "{} peripheral entries for {} cusps",
            peripheral.len(),
            cx.cusps.len()
        )));
    }
    for (j, pp) in peripheral.iter().enumerate() {
        let mu = cx.parse_closed_path(j, "meridian", &pp.meridian)?;
        let la = cx.parse_closed_path(j, "longitude", &pp.longitude)?;
        cx.cusps[j].meridian = mu;
        cx.cusps[j].longitude = la;
    }
    cx.trees = (0..cx.cusps.len()).map(|j| cx.bfs_tree(j)).collect();
    cx.coords = cx.solve_coordinates()?;
    Ok(cx)
}

fn orient(table: &[[(usize, Perm); 4]], given: Option<&[i8]>) -> Result<Vec<i8>> {
    let n = table.len();
    if let Some(g) = given {
        if g.len() != n || g.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Malformed(
                "orientation list must hold one ±1 per tetrahedron".into(),
            ));
        }
        for t in 0..n {
            for f in 0..4 {
                let (t2, p) = table[t][f];
                if g[t2] != -p.sign() * g[t] {
                    return Err(Error::Orientation { tet: t2 });
                }
            }
        }
        return Ok(g.to_vec());
    }
    let mut eps = vec![0i8; n];
    for start in 0..n {
        if eps[start] != 0 {
            continue;
        }
        eps[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for f in 0..4 {
                let (t2, p) = table[t][f];
                let want = -p.sign() * eps[t];
                if eps[t2] == 0 {
                    eps[t2] = want;
                    queue.push_back(t2);
                } else if eps[t2] != want {
                    return Err(Error::Orientation { tet: t2 });
                }
            }
        }
    }
    Ok(eps)
}

impl TruncatedComplex {
    pub fn tetrahedron_count(&self) -> usize {
        self.gluing.len()
    }

    pub fn orientation(&self, t: usize) -> i8 {
        self.orientation[t]
    }

    pub fn orientations(&self) -> &[i8] {
        &self.orientation
    }

    pub fn neighbor(&self, t: usize, f: usize) -> (usize, Perm) {
        self.gluing[t][f]
    }

    pub fn classes(&self) -> &[LongEdgeClass] {
        &self.classes
    }

    /// Class and relative sign of the tetrahedron edge `ab` (either order).
    pub fn long_class(&self, t: usize, a: usize, b: usize) -> (usize, i8) {
        let (c, s) = self.edge_class[t][edge_index(a, b)];
        (c, if a < b { s } else { -s })
    }

    /// Cusp vertex of the corner at truncated vertex `v` on edge `vw`.
    pub fn corner_vertex(&self, t: usize, v: usize, w: usize) -> usize {
        self.corner_vertex[t][v][w]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_cusp.len()
    }

    pub fn vertex_cusp(&self, v: usize) -> usize {
        self.vertex_cusp[v]
    }

    /// The two cusp vertices at the ends of a long-edge class.
    pub fn class_ends(&self, class: usize) -> (usize, usize) {
        let m = self.classes[class].members[0];
        (
            self.corner_vertex[m.tet][m.a][m.b],
            self.corner_vertex[m.tet][m.b][m.a],
        )
    }

    pub fn short_edges(&self) -> &[ShortEdge] {
        &self.short_edges
    }

    pub fn short_edge_count(&self) -> usize {
        self.short_edges.len()
    }

    pub fn short_ref(&self, s: ShortSlot) -> ShortEdgeRef {
        self.short_of[s.tet][s.v][s.a][s.b]
    }

    /// A slot realizing the oriented edge.
    pub fn slot_of(&self, e: ShortEdgeRef) -> ShortSlot {
        let s = self.short_edges[e.edge].slots[0];
        if e.forward {
            s
        } else {
            s.reversed()
        }
    }

    pub fn tail(&self, e: ShortEdgeRef) -> usize {
        let s = &self.short_edges[e.edge];
        if e.forward {
            s.tail
        } else {
            s.head
        }
    }

    pub fn head(&self, e: ShortEdgeRef) -> usize {
        self.tail(e.reversed())
    }

    pub fn cusps(&self) -> &[Cusp] {
        &self.cusps
    }

    pub fn cusp_count(&self) -> usize {
        self.cusps.len()
    }

    pub fn tree(&self, cusp: usize) -> &SpanningTree {
        &self.trees[cusp]
    }

    pub fn sigma_template(&self) -> Option<&[Monomial]> {
        self.sigma_template.as_deref()
    }

    /// Integer exponents `(X, Y)` with `σ(e) = M^X L^Y` for the coordinate
    /// cocycle (trivial on the cached spanning tree).
    pub fn coordinates(&self, e: usize) -> (i64, i64) {
        self.coords[e]
    }

    /// Homology class of a closed path in the `(μ, λ)` basis.
    pub fn homology_class(&self, path: &[ShortEdgeRef]) -> (i64, i64) {
        path.iter().fold((0, 0), |(x, y), e| {
            let (a, b) = self.coords[e.edge];
            (x + e.sign() * a, y + e.sign() * b)
        })
    }

    /// Boundary of the cusp triangle at `(t, v)` as `a→b→c→a`, `a < b < c`.
    pub fn triangle_cycle(&self, t: usize, v: usize) -> [ShortEdgeRef; 3] {
        let [a, b, c] = others(v);
        [
            self.short_of[t][v][a][b],
            self.short_of[t][v][b][c],
            self.short_of[t][v][c][a],
        ]
    }

    /// `+1` when the increasing corner order of the cusp triangle at
    /// `(t, v)` is counterclockwise in the induced cusp orientation.
    pub fn triangle_sign(&self, t: usize, v: usize) -> i8 {
        let parity = if v % 2 == 0 { 1 } else { -1 };
        -self.orientation[t] * parity
    }

    /// Whether corners `(x, y, z)` of the triangle at `(t, v)` run
    /// counterclockwise.
    pub fn is_ccw(&self, t: usize, v: usize, x: usize, y: usize, z: usize) -> bool {
        debug_assert_eq!(missing([x, y, z]), v);
        let [a, b, c] = others(v);
        let ascending = [(a, b, c), (b, c, a), (c, a, b)].contains(&(x, y, z));
        (ascending as i8 * 2 - 1) * self.triangle_sign(t, v) == 1
    }

    fn check_cusp_orientation(&self) -> Result<()> {
        for e in &self.short_edges {
            let signs: Vec<i8> = e
                .slots
                .iter()
                .map(|s| {
                    let z = missing([s.v, s.a, s.b]);
                    if self.is_ccw(s.tet, s.v, s.a, s.b, z) {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            if signs.len() != 2 || signs[0] == signs[1] {
                return Err(Error::Orientation {
                    tet: e.slots[0].tet,
                });
            }
        }
        Ok(())
    }

    fn parse_closed_path(&self, cusp: usize, name: &str, ids: &[i32]) -> Result<Vec<ShortEdgeRef>> {
        let bad = |reason: String| Error::BadPath {
            cusp,
            name: name.into(),
            reason,
        };
        let mut path = Vec::with_capacity(ids.len());
        for &id in ids {
            let e = ShortEdgeRef::from_signed(id)
                .filter(|e| e.edge < self.short_edges.len())
                .ok_or_else(|| bad(format!("unknown short edge {id}")))?;
            path.push(e);
        }
        self.check_closed(cusp, &path).map_err(|e| match e {
            Error::BadPath { reason, .. } => bad(reason),
            other => other,
        })?;
        Ok(path)
    }

    /// Verifies that `path` is a closed edge-path on cusp `cusp`.
    pub fn check_closed(&self, cusp: usize, path: &[ShortEdgeRef]) -> Result<()> {
        let bad = |reason: String| Error::BadPath {
            cusp,
            name: "path".into(),
            reason,
        };
        if cusp >= self.cusps.len() {
            return Err(bad("no such cusp".into()));
        }
        for (i, e) in path.iter().enumerate() {
            if e.edge >= self.short_edges.len() {
                return Err(bad(format!("unknown short edge {}", e.to_signed())));
            }
            if self.short_edges[e.edge].cusp != cusp {
                return Err(bad(format!("edge {} is not on this cusp", e.to_signed())));
            }
            let next = path[(i + 1) % path.len()];
            if self.head(*e) != self.tail(next) {
                return Err(bad(format!("not closed after edge {}", e.to_signed())));
            }
        }
        Ok(())
    }

    fn bfs_tree(&self, cusp: usize) -> SpanningTree {
        let root = self.cusps[cusp].vertices[0];
        let adj = self.adjacency(cusp);
        let mut parent = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[root] = true;
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &e in &adj[x] {
                let y = self.head(e);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(e);
                    edges.push(e.edge);
                    queue.push_back(y);
                }
            }
        }
        edges.sort_unstable();
        SpanningTree {
            root,
            parent,
            edges,
        }
    }

    /// Outgoing oriented edges per vertex, in edge order.
    fn adjacency(&self, cusp: usize) -> Vec<Vec<ShortEdgeRef>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &i in &self.cusps[cusp].edges {
            let e = ShortEdgeRef {
                edge: i,
                forward: true,
            };
            adj[self.tail(e)].push(e);
            adj[self.head(e)].push(e.reversed());
        }
        adj
    }

    /// A uniformly shuffled spanning tree of the cusp, rooted at the same
    /// vertex as the cached one.
    pub fn random_spanning_tree<R: Rng>(&self, cusp: usize, rng: &mut R) -> SpanningTree {
        let root = self.cusps[cusp].vertices[0];
        let mut order = self.cusps[cusp].edges.clone();
        order.shuffle(rng);
        let mut uf = UnionFind::new(self.vertex_count());
        let mut edges: Vec<usize> = order
            .into_iter()
            .filter(|&i| {
                let e = &self.short_edges[i];
                uf.union(e.tail, e.head)
            })
            .collect();
        edges.sort_unstable();
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &i in &edges {
            let e = ShortEdgeRef {
                edge: i,
                forward: true,
            };
            adj[self.tail(e)].push(e);
            adj[self.head(e)].push(e.reversed());
        }
        let mut parent = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &e in &adj[x] {
                let y = self.head(e);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(e);
                    stack.push(y);
                }
            }
        }
        SpanningTree {
            root,
            parent,
            edges,
        }
    }

    /// Integer cocycles dual to `(μ_j, λ_j)`, vanishing on the trees.
    fn solve_coordinates(&self) -> Result<Vec<(i64, i64)>> {
        let mut coords = vec![(0, 0); self.short_edges.len()];
        for (j, cusp) in self.cusps.iter().enumerate() {
            let col: std::collections::HashMap<usize, usize> = cusp
                .edges
                .iter()
                .enumerate()
                .map(|(k, &e)| (e, k))
                .collect();
            let ne = cusp.edges.len();
            let mut rows = Vec::new();
            for &(t, v) in &cusp.triangles {
                let mut r = vec![0i64; ne];
                for e in self.triangle_cycle(t, v) {
                    r[col[&e.edge]] += e.sign();
                }
                rows.push(r);
            }
            for &e in &self.trees[j].edges {
                let mut r = vec![0i64; ne];
                r[col[&e]] = 1;
                rows.push(r);
            }
            for path in [&cusp.meridian, &cusp.longitude] {
                let mut r = vec![0i64; ne];
                for e in path.iter() {
                    r[col[&e.edge]] += e.sign();
                }
                rows.push(r);
            }
            let k = rows.len();
            let solve = |mu: i64, la: i64| -> Option<Vec<i64>> {
                let mut rhs = vec![0i64; k];
                rhs[k - 2] = mu;
                rhs[k - 1] = la;
                let sol = solve_rational(&rows, &rhs, ne)?;
                sol.iter()
                    .map(|x: &Rational64| x.is_integer().then(|| x.to_integer()))
                    .collect()
            };
            let x = solve(1, 0).ok_or(Error::NotBasis { cusp: j })?;
            let y = solve(0, 1).ok_or(Error::NotBasis { cusp: j })?;
            for (k, &e) in cusp.edges.iter().enumerate() {
                coords[e] = (x[k], y[k]);
            }
        }
        Ok(coords)
    }

    /// Attaches a σ template after checking that it is a cocycle with the
    /// right peripheral holonomy.
    pub fn with_sigma_template(mut self, template: Vec<Monomial>) -> Result<TruncatedComplex> {
        let h = self.cusps.len();
        if template.len() != self.short_edges.len() {
            return Err(Error::Template(format!(
                "{} entries for {} short edges",
                template.len(),
                self.short_edges.len()
            )));
        }
        if template.iter().any(|m| m.exps.len() != h) {
            return Err(Error::Template(
                "monomial arity does not match the cusp count".into(),
            ));
        }
        let along = |path: &[ShortEdgeRef]| {
            path.iter().fold(Monomial::one(h), |acc, e| {
                let m = &template[e.edge];
                acc.mul(&if e.forward { m.clone() } else { m.inv() })
            })
        };
        for t in 0..self.tetrahedron_count() {
            for v in 0..4 {
                if !along(&self.triangle_cycle(t, v)).is_one() {
                    return Err(Error::Template(format!(
                        "not a cocycle at triangle ({t}, {v})"
                    )));
                }
            }
        }
        for (j, c) in self.cusps.iter().enumerate() {
            if along(&c.meridian) != Monomial::meridian(h, j)
                || along(&c.longitude) != Monomial::longitude(h, j)
            {
                return Err(Error::Template(format!(
                    "induced holonomy on cusp {j} is not (M, L)"
                )));
            }
        }
        self.sigma_template = Some(template);
        Ok(self)
    }

    /// Exact inverse of [`build_complex`] inputs, used for serialization.
    pub fn face_pairing_data(&self) -> FacePairingData {
        let mut gluings = Vec::new();
        for t in 0..self.gluing.len() {
            for f in 0..4 {
                let (t2, p) = self.gluing[t][f];
                let f2 = p.apply(f);
                if (t, f) <= (t2, f2) {
                    gluings.push(FaceGluing {
                        tet: t,
                        face: f,
                        nbr_tet: t2,
                        nbr_face: f2,
                        perm: p,
                    });
                }
            }
        }
        FacePairingData {
            tetrahedron_count: self.gluing.len(),
            gluings,
        }
    }

    pub fn peripheral_paths(&self) -> Vec<PeripheralPaths> {
        self.cusps
            .iter()
            .map(|c| PeripheralPaths {
                meridian: c.meridian.iter().map(|e| e.to_signed()).collect(),
                longitude: c.longitude.iter().map(|e| e.to_signed()).collect(),
            })
            .collect()
    }
}
