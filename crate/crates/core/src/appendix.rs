//! Embedded appendix tables: canonical orientations, printed matrices, δ and
//! tube mouths, keyed by preset name.
//!
//! Vectors in `presets.txt` are stored in display order and converted to
//! vertex order on load.

use std::sync::OnceLock;

use crate::catalog::TubeLabel;
use crate::lattice::{DimVector, IntMatrix};
use crate::quiver::Quiver;

pub const PRESETS_TXT: &str = include_str!("../data/presets.txt");
pub const PAIRS_TXT: &str = include_str!("../data/pairs.txt");
pub const FORMULAS_TXT: &str = include_str!("../data/formulas.txt");

#[derive(Clone, Debug)]
pub struct AppendixTube {
    pub label: TubeLabel,
    /// Position `l - 1` holds `dim R_e^l(1)`, vertex order.
    pub mouth: Vec<DimVector>,
    /// The source figure is empty; the mouth was rebuilt from pair rows.
    pub derived: bool,
}

#[derive(Clone, Debug)]
pub struct AppendixPreset {
    pub name: String,
    /// 0-based vertex at each display position.
    pub layout: Vec<usize>,
    pub quiver: Quiver,
    pub delta: DimVector,
    pub cartan: IntMatrix,
    pub coxeter: IntMatrix,
    pub tubes: Vec<AppendixTube>,
}

pub fn appendix() -> &'static [AppendixPreset] {
    static DATA: OnceLock<Vec<AppendixPreset>> = OnceLock::new();
    DATA.get_or_init(|| parse_presets(PRESETS_TXT).unwrap_or_else(|e| panic!("embedded presets.txt: {e}")))
}

pub fn appendix_preset(name: &str) -> Option<&'static AppendixPreset> {
    appendix().iter().find(|p| p.name == name)
}

/// The appendix preset with exactly this orientation, if any.
pub fn appendix_for(q: &Quiver) -> Option<&'static AppendixPreset> {
    appendix().iter().find(|p| &p.quiver == q)
}

fn ints(s: &str) -> Result<Vec<i64>, String> {
    s.split_whitespace().map(|t| t.parse::<i64>().map_err(|_| format!("bad integer {t:?}"))).collect()
}

fn parse_presets(text: &str) -> Result<Vec<AppendixPreset>, String> {
    let mut out = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    let mut name = None;
    for line in text.lines().chain(std::iter::once("[end]")) {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('[') {
            if let Some(prev) = name.take() {
                out.push(parse_block(prev, &block)?);
            }
            block.clear();
            name = Some(rest.trim_end_matches(']').to_string());
        } else if !line.is_empty() {
            block.push(line);
        }
    }
    Ok(out)
}

fn parse_block(name: String, lines: &[&str]) -> Result<AppendixPreset, String> {
    let mut layout = Vec::new();
    let mut arrows = Vec::new();
    let mut delta_layout = Vec::new();
    let (mut c_rows, mut phi_rows) = (Vec::new(), Vec::new());
    let mut tubes_raw = Vec::new();
    let mut derived_next = false;
    for line in lines {
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "#" => derived_next = rest.contains("figure absent"),
            "layout" => layout = ints(rest)?.into_iter().map(|v| v as usize - 1).collect(),
            "arrows" => {
                for tok in rest.split_whitespace() {
                    let (t, h) = tok.split_once("->").ok_or(format!("bad arrow {tok}"))?;
                    arrows.push((
                        t.parse::<usize>().map_err(|e| e.to_string())?,
                        h.parse::<usize>().map_err(|e| e.to_string())?,
                    ));
                }
            }
            "delta" => delta_layout = ints(rest)?,
            "C" => c_rows.push(ints(rest)?),
            "Phi" => phi_rows.push(ints(rest)?),
            "tube" => {
                let (label, vecs) = rest.split_once(' ').ok_or("empty tube line")?;
                let label: TubeLabel = label.parse().map_err(|e| format!("{e}"))?;
                let mouth = vecs.split('|').map(ints).collect::<Result<Vec<_>, _>>()?;
                tubes_raw.push((label, mouth, derived_next));
                derived_next = false;
            }
            other => return Err(format!("{name}: unknown key {other:?}")),
        }
    }
    let n = layout.len();
    let from_layout = |v: &[i64]| -> DimVector {
        let mut out = vec![0; n];
        for (k, &i) in layout.iter().enumerate() {
            out[i] = v[k];
        }
        DimVector::new(out)
    };
    let quiver = Quiver::from_one_based(n, &arrows).map_err(|e| format!("{name}: {e}"))?;
    let tubes = tubes_raw
        .into_iter()
        .map(|(label, mouth, derived)| AppendixTube {
            label,
            mouth: mouth.iter().map(|v| from_layout(v)).collect(),
            derived,
        })
        .collect();
    Ok(AppendixPreset {
        delta: from_layout(&delta_layout),
        cartan: IntMatrix::from_rows(c_rows).map_err(|e| e.to_string())?,
        coxeter: IntMatrix::from_rows(phi_rows).map_err(|e| e.to_string())?,
        name,
        layout,
        quiver,
        tubes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{CanonicalPreset, APPENDIX_PRESETS};

    #[test]
    fn all_presets_present() {
        let names: Vec<&str> = appendix().iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, APPENDIX_PRESETS);
    }

    #[test]
    fn generators_reproduce_appendix_orientations_and_layouts() {
        for p in appendix() {
            let c = CanonicalPreset::by_name(&p.name).unwrap();
            assert_eq!(c.quiver, p.quiver, "{}", p.name);
            assert_eq!(c.layout, p.layout, "{}", p.name);
        }
    }

    #[test]
    fn derived_tubes_are_marked() {
        let derived: Vec<(String, String)> = appendix()
            .iter()
            .flat_map(|p| p.tubes.iter().filter(|t| t.derived).map(move |t| (p.name.clone(), t.label.to_string())))
            .collect();
        assert_eq!(derived, vec![("A~3,5".to_string(), "0".to_string()), ("E~8".to_string(), "1".to_string())]);
    }
}
