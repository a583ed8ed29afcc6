//! Appendix-style re-emission of every pair list up to a preprojective index.

use std::fmt::Write as _;
use std::ops::Range;

use serde::Serialize;

use crate::catalog::{ModuleId, TubeLabel};
use crate::error::Result;
use crate::forms::EuclideanQuiver;
use crate::lattice::DimVector;
use crate::schofield::{appendix_order, SchofieldPair};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportLine {
    pub module: ModuleId,
    pub dim: DimVector,
    pub pairs: Vec<SchofieldPair>,
}

impl ReportLine {
    pub fn appendix_text(&self) -> String {
        let list = if self.pairs.is_empty() {
            "-".to_string()
        } else {
            self.pairs.iter().map(SchofieldPair::appendix_text).collect::<Vec<_>>().join(", ")
        };
        format!("{}: {list}", self.module.appendix_text())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportSection {
    pub title: String,
    pub lines: Vec<ReportLine>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub quiver: String,
    pub ty: String,
    pub delta: DimVector,
    pub range: [u32; 2],
    pub sections: Vec<ReportSection>,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "quiver: {}", self.quiver);
        let _ = writeln!(s, "type: {}", self.ty);
        let _ = writeln!(s, "delta: {}", self.delta);
        let _ = writeln!(s, "range: {}..{}", self.range[0], self.range[1]);
        for sec in &self.sections {
            let _ = writeln!(s, "\n[{}]", sec.title);
            for line in &sec.lines {
                let _ = writeln!(s, "{}", line.appendix_text());
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn line(eq: &EuclideanQuiver, module: ModuleId) -> Result<ReportLine> {
    let dim = eq.dim_of(&module)?;
    let mut pairs = eq.all_pairs(&dim)?;
    appendix_order(module.family(), &mut pairs);
    Ok(ReportLine { module, dim, pairs })
}

/// Preprojectives and preinjectives with index in `range`, vertex by vertex,
/// then every exceptional regular module tube by tube. An empty range gives
/// the header alone.
pub fn emit_report(eq: &EuclideanQuiver, range: Range<u32>) -> Result<Report> {
    let n = eq.n();
    let mut sections = Vec::new();
    if !range.is_empty() {
        let mut pre = Vec::new();
        let mut inj = Vec::new();
        for vertex in 1..=n {
            for k in range.clone() {
                pre.push(line(eq, ModuleId::Preproj { n: k, vertex })?);
                inj.push(line(eq, ModuleId::Preinj { n: k, vertex })?);
            }
        }
        sections.push(ReportSection { title: "preprojective".into(), lines: pre });
        sections.push(ReportSection { title: "preinjective".into(), lines: inj });
        for tube in eq.tubes()? {
            let m = tube.rank();
            let mut lines = Vec::new();
            for l in 1..=m {
                for t in 1..m {
                    lines.push(line(eq, ModuleId::Regular { tube: tube.label, l, t })?);
                }
            }
            let title = match tube.label {
                TubeLabel::Synthetic(_) => format!("tube {} rank {m}", tube.label),
                _ => format!("tube T_{} rank {m}", tube.label),
            };
            sections.push(ReportSection { title, lines });
        }
    }
    Ok(Report {
        quiver: eq.quiver().to_string(),
        ty: eq.ty().to_string(),
        delta: eq.delta().clone(),
        range: [range.start, range.end],
        sections,
    })
}
