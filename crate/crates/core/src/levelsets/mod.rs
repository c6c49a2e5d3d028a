//! The arc-counting machinery: difference fields on overlapped translated
//! strips, critical point detection, zero-set arc extraction and
//! classification, level-region evolution, and the rotational tangency
//! search.

mod arcs;
mod critical;
mod difference;
mod fixtures;
mod regions;
mod tangency;

pub use arcs::{
    arc_count_report, classify_arcs, extract_zero_arcs, Arc, ArcCountReport, ArcSet, ArcType,
    CriticalPointArcs, EndKind, Verdict,
};
pub use critical::{find_critical_points, CriticalPoint};
pub use difference::{difference_field, DifferenceSpec, SpecialPoints};
pub use fixtures::Fixture;
pub use regions::{level_region_trace, RegionStep, RegionTrace};
pub use tangency::{tangency_search, TangencyConfig, TangencyReport};

/// Arc CSV rows: `arc_id,type,x,y`.
pub fn arcs_to_csv(set: &ArcSet) -> String {
    let mut out = String::from("arc_id,type,x,y\n");
    for (k, arc) in set.arcs.iter().enumerate() {
        let label = match arc.arc_type {
            ArcType::TypeIPlusX => "i",
            ArcType::TypeIiMinusX => "ii",
            ArcType::TypeIiiThroughXi => "iii",
            ArcType::TypeIvThroughXhat => "iv",
            ArcType::ClosedLoop => "loop",
            ArcType::Indeterminate => "indeterminate",
        };
        for p in &arc.points {
            out.push_str(&format!("{k},{label},{:.16e},{:.16e}\n", p.0, p.1));
        }
    }
    out
}
