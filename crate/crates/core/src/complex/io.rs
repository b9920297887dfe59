//! Versioned JSON triangulation documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    build_complex, FaceGluing, FacePairingData, LongEdge, PeripheralPaths, Perm, TruncatedComplex,
};
use crate::monomial::Monomial;
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format_version: u32,
    name: String,
    tetrahedra: Vec<TetEntry>,
    face_gluings: Vec<GluingEntry>,
    cusps: Vec<CuspEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_template: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    long_edge_classes: Option<Vec<ClassEntry>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TetEntry {
    index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<i8>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GluingEntry {
    tet: usize,
    face: usize,
    nbr_tet: usize,
    nbr_face: usize,
    perm: Perm,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CuspEntry {
    index: usize,
    meridian: Vec<i32>,
    longitude: Vec<i32>,
}

/// Informational copy of the long-edge classes; checked on load.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassEntry {
    id: usize,
    members: Vec<[usize; 3]>,
}

pub fn save_complex(cx: &TruncatedComplex) -> Vec<u8> {
    let pairing = cx.face_pairing_data();
    let doc = Document {
        format_version: FORMAT_VERSION,
        name: cx.name.clone(),
        tetrahedra: cx
            .orientations()
            .iter()
            .enumerate()
            .map(|(index, &o)| TetEntry {
                index,
                orientation: Some(o),
            })
            .collect(),
        face_gluings: pairing
            .gluings
            .iter()
            .map(|g| GluingEntry {
                tet: g.tet,
                face: g.face,
                nbr_tet: g.nbr_tet,
                nbr_face: g.nbr_face,
                perm: g.perm,
            })
            .collect(),
        cusps: cx
            .peripheral_paths()
            .into_iter()
            .enumerate()
            .map(|(index, p)| CuspEntry {
                index,
                meridian: p.meridian,
                longitude: p.longitude,
            })
            .collect(),
        sigma_template: cx.sigma_template().map(|t| {
            t.iter()
                .enumerate()
                .map(|(i, m)| ((i + 1).to_string(), m.to_string()))
                .collect()
        }),
        long_edge_classes: Some(
            cx.classes()
                .iter()
                .enumerate()
                .map(|(id, c)| ClassEntry {
                    id,
                    members: c.members.iter().map(|m| [m.tet, m.a, m.b]).collect(),
                })
                .collect(),
        ),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("document serializes");
    out.push(b'\n');
    out
}

pub fn load_complex(bytes: &[u8]) -> Result<TruncatedComplex> {
    let doc: Document =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Version(doc.format_version));
    }
    let n = doc.tetrahedra.len();
    for (i, t) in doc.tetrahedra.iter().enumerate() {
        if t.index != i {
            return Err(Error::Malformed(format!(
                "tetrahedron entry {i} has index {}",
                t.index
            )));
        }
    }
    let orientation: Option<Vec<i8>> = doc.tetrahedra.iter().map(|t| t.orientation).collect();
    if orientation.is_none() && doc.tetrahedra.iter().any(|t| t.orientation.is_some()) {
        return Err(Error::Malformed(
            "orientation must be given for all tetrahedra or none".into(),
        ));
    }
    let pairing = FacePairingData {
        tetrahedron_count: n,
        gluings: doc
            .face_gluings
            .iter()
            .map(|g| FaceGluing {
                tet: g.tet,
                face: g.face,
                nbr_tet: g.nbr_tet,
                nbr_face: g.nbr_face,
                perm: g.perm,
            })
            .collect(),
    };
    let mut peripheral = Vec::with_capacity(doc.cusps.len());
    for (i, c) in doc.cusps.iter().enumerate() {
        if c.index != i {
            return Err(Error::Malformed(format!(
                "cusp entry {i} has index {}",
                c.index
            )));
        }
        peripheral.push(PeripheralPaths {
            meridian: c.meridian.clone(),
            longitude: c.longitude.clone(),
        });
    }
    let mut cx = build_complex(&pairing, &peripheral, orientation.as_deref())?;
    cx.name = doc.name;

    if let Some(classes) = &doc.long_edge_classes {
        let mut seen = std::collections::HashSet::new();
        for c in classes {
            if !seen.insert(c.id) {
                return Err(Error::Malformed(format!(
                    "duplicate long-edge class id {}",
                    c.id
                )));
            }
        }
        if classes.len() != cx.classes().len() {
            return Err(Error::Malformed(
                "long-edge class list does not match the gluing".into(),
            ));
        }
        for c in classes {
            let members: Vec<LongEdge> = c
                .members
                .iter()
                .map(|&[tet, a, b]| LongEdge { tet, a, b })
                .collect();
            if cx.classes().get(c.id).map(|k| &k.members) != Some(&members) {
                return Err(Error::Malformed(format!(
                    "long-edge class {} does not match the gluing",
                    c.id
                )));
            }
        }
    }

    if let Some(map) = &doc.sigma_template {
        let e = cx.short_edge_count();
        let mut template = vec![None; e];
        for (k, v) in map {
            let id: usize = k
                .parse()
                .map_err(|_| Error::Template(format!("bad short-edge id {k:?}")))?;
            if id == 0 || id > e {
                return Err(Error::Template(format!("short-edge id {id} out of range")));
            }
            template[id - 1] = Some(Monomial::parse(v, cx.cusp_count())?);
        }
        let template: Option<Vec<Monomial>> = template.into_iter().collect();
        let template = template.ok_or_else(|| Error::Template("missing entries".into()))?;
        cx = cx.with_sigma_template(template)?;
    }
    Ok(cx)
}
