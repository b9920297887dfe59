#![allow(dead_code)]

use std::collections::HashMap;

use fillvol::complex::{
    build_complex, census_figure_eight, missing, FaceGluing, FacePairingData, PeripheralPaths,
    ShortEdgeRef, TruncatedComplex,
};
use fillvol::peripheral::a_polynomial;
use fillvol::Complex64;

pub fn fig8() -> TruncatedComplex {
    census_figure_eight().0
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Roots `L` of the figure-eight A-polynomial at a given `M`.
pub fn a_curve(m: Complex64) -> [Complex64; 2] {
    let poly = a_polynomial(&fig8()).unwrap();
    let mut coeff = [c(0.0, 0.0); 3];
    for (&(dm, dl), &k) in &poly.0 {
        coeff[dl as usize] += m.powi(dm) * k as f64;
    }
    let [c0, c1, c2] = coeff;
    let disc = (c1 * c1 - c2 * c0 * 4.0).sqrt();
    [(-c1 + disc) / (c2 * 2.0), (-c1 - disc) / (c2 * 2.0)]
}

type Slot = (usize, usize, usize, usize);
type Corner = (usize, usize, usize);

fn find<T: Copy + Eq + std::hash::Hash>(parent: &mut HashMap<T, T>, x: T) -> T {
    let p = *parent.get(&x).unwrap_or(&x);
    if p == x {
        return x;
    }
    let r = find(parent, p);
    parent.insert(x, r);
    r
}

fn union<T: Copy + Eq + std::hash::Hash>(parent: &mut HashMap<T, T>, a: T, b: T) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent.insert(ra, rb);
    }
}

struct Combinatorics {
    /// Signed 1-based short-edge id of every slot.
    ids: HashMap<Slot, i32>,
    corners: HashMap<Corner, Corner>,
}

fn neighbor(fp: &FacePairingData, t: usize, f: usize) -> (usize, [usize; 4]) {
    for g in &fp.gluings {
        if (g.tet, g.face) == (t, f) {
            return (g.nbr_tet, g.perm.images().map(usize::from));
        }
        if (g.nbr_tet, g.nbr_face) == (t, f) {
            return (g.tet, g.perm.inverse().images().map(usize::from));
        }
    }
    panic!("unglued face");
}

/// Short-edge numbering and corner identification, computed from the face
/// pairing alone.
fn combinatorics(fp: &FacePairingData) -> Combinatorics {
    let n = fp.tetrahedron_count;
    let mut slots = Vec::new();
    for t in 0..n {
        for v in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    if a != v && b != v && a != b {
                        slots.push((t, v, a, b));
                    }
                }
            }
        }
    }
    let partner = |(t, v, a, b): Slot| {
        let (t2, p) = neighbor(fp, t, missing([v, a, b]));
        (t2, p[v], p[a], p[b])
    };
    let mut groups: HashMap<Slot, Slot> = HashMap::new();
    for &s in &slots {
        union(&mut groups, s, partner(s));
    }
    let mut reps: HashMap<Slot, Slot> = HashMap::new();
    for &s in &slots {
        let r = find(&mut groups, s);
        if s.2 < s.3 {
            let e = reps.entry(r).or_insert(s);
            if s < *e {
                *e = s;
            }
        }
    }
    // A group is one oriented orbit; its reversal is another group.
    let mut orbits: Vec<Slot> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &s in &slots {
        let r = find(&mut groups, s);
        let rr = find(&mut groups, (s.0, s.1, s.3, s.2));
        if seen.insert(r) {
            seen.insert(rr);
            let cand = [reps.get(&r), reps.get(&rr)]
                .into_iter()
                .flatten()
                .min()
                .copied()
                .unwrap();
            orbits.push(cand);
        }
    }
    orbits.sort();
    let mut ids = HashMap::new();
    for (i, &rep) in orbits.iter().enumerate() {
        let fwd = find(&mut groups, rep);
        for &s in &slots {
            let g = find(&mut groups, s);
            if g == fwd {
                ids.insert(s, i as i32 + 1);
                ids.insert((s.0, s.1, s.3, s.2), -(i as i32 + 1));
            }
        }
    }
    let mut corners: HashMap<Corner, Corner> = HashMap::new();
    for t in 0..n {
        for f in 0..4 {
            let (t2, p) = neighbor(fp, t, f);
            for v in 0..4 {
                for w in 0..4 {
                    if v != w && v != f && w != f {
                        union(&mut corners, (t, v, w), (t2, p[v], p[w]));
                    }
                }
            }
        }
    }
    Combinatorics { ids, corners }
}

/// A connected double cover of a one-cusp triangulation whose cusp lifts to a
/// single cusp, with peripheral curves `μ²` and `λ` (or their lifts).
pub fn double_cover(cx: &TruncatedComplex) -> TruncatedComplex {
    let base = cx.face_pairing_data();
    let n = base.tetrahedron_count;
    let base_comb = combinatorics(&base);
    // The replica numbering must agree with the library's.
    for (&(t, v, a, b), &id) in &base_comb.ids {
        let got = cx
            .short_ref(fillvol::complex::ShortSlot { tet: t, v, a, b })
            .to_signed();
        assert_eq!(got, id, "numbering replica disagrees at {:?}", (t, v, a, b));
    }
    let paths = &cx.peripheral_paths()[0];
    for mask in 1u32..(1 << base.gluings.len()) {
        let mut gluings = Vec::new();
        for (i, g) in base.gluings.iter().enumerate() {
            let bit = ((mask >> i) & 1) as usize;
            for s in 0..2 {
                gluings.push(FaceGluing {
                    tet: g.tet + n * s,
                    face: g.face,
                    nbr_tet: g.nbr_tet + n * (s ^ bit),
                    nbr_face: g.nbr_face,
                    perm: g.perm,
                });
            }
        }
        let fp = FacePairingData {
            tetrahedron_count: 2 * n,
            gluings,
        };
        let mut comb = combinatorics(&fp);
        let lift = |comb: &mut Combinatorics, path: &[i32], times: usize| -> Option<Vec<i32>> {
            let mut out = Vec::new();
            let mut start = None;
            let mut current = None;
            for _ in 0..times {
                for &id in path {
                    let e = ShortEdgeRef::from_signed(id).unwrap();
                    let s = cx.slot_of(e);
                    let mut moved = false;
                    for sheet in 0..2 {
                        let t = s.tet + n * sheet;
                        let tail = find(&mut comb.corners, (t, s.v, s.a));
                        if current.is_none() || current == Some(tail) {
                            start.get_or_insert(tail);
                            current = Some(find(&mut comb.corners, (t, s.v, s.b)));
                            out.push(comb.ids[&(t, s.v, s.a, s.b)]);
                            moved = true;
                            break;
                        }
                    }
                    if !moved {
                        return None;
                    }
                }
            }
            (current == start).then_some(out)
        };
        let Some(mer) =
            lift(&mut comb, &paths.meridian, 1).or_else(|| lift(&mut comb, &paths.meridian, 2))
        else {
            continue;
        };
        let Some(lon) =
            lift(&mut comb, &paths.longitude, 1).or_else(|| lift(&mut comb, &paths.longitude, 2))
        else {
            continue;
        };
        let peripheral = [PeripheralPaths {
            meridian: mer,
            longitude: lon,
        }];
        if let Ok(cover) = build_complex(&fp, &peripheral, None) {
            if cover.cusp_count() == 1 {
                return cover;
            }
        }
    }
    panic!("no connected one-cusp double cover found");
}
