//! Verification suites and the report they produce.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tileupb::discrimination::{self, StateSet};
use tileupb::linalg::orthonormal_complement;
use tileupb::states::{self, DensityMatrix};
use tileupb::tiles::{self, ProductState};
use tileupb::verify::{self, tol};
use tileupb::{Certificate, Confidence, Ket, Status};

use crate::args::{RunConfig, Suite};
use crate::error::CliResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub anchor: String,
    pub expected: Status,
    pub certificate: Certificate,
}

impl Entry {
    pub fn matches(&self) -> bool {
        self.certificate.status == self.expected
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    /// Passes that rest on a search rather than a proof.
    pub evidence_passes: usize,
    pub expected_failures: usize,
    pub unexpected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub d: usize,
    pub variant: tileupb::Variant,
    pub seed: u64,
    pub suite: String,
    pub config: Value,
    pub entries: Vec<Entry>,
    pub summary: Summary,
}

impl Report {
    pub fn all_as_expected(&self) -> bool {
        self.summary.unexpected.is_empty()
    }

    pub fn entry(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn summarize(entries: &[Entry]) -> Summary {
    let mut s = Summary { total: entries.len(), ..Default::default() };
    for e in entries {
        match e.certificate.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::Inconclusive => s.inconclusive += 1,
        }
        if e.certificate.status == Status::Pass && e.certificate.confidence == Confidence::Evidence {
            s.evidence_passes += 1;
        }
        if e.expected == Status::Fail && e.matches() {
            s.expected_failures += 1;
        }
        if !e.matches() {
            s.unexpected.push(e.id.clone());
        }
    }
    s
}

struct Collector<'a> {
    cfg: &'a RunConfig,
    entries: Vec<Entry>,
}

impl Collector<'_> {
    fn add(
        &mut self,
        id: impl Into<String>,
        anchor: &str,
        expected: Status,
        f: impl FnOnce() -> tileupb::Result<Certificate>,
    ) -> CliResult<()> {
        let certificate = if self.cfg.timings { Certificate::timed(f)? } else { f()? };
        self.entries.push(Entry { id: id.into(), anchor: anchor.into(), expected, certificate });
        Ok(())
    }
}

fn kets(states: &[ProductState]) -> Vec<Ket> {
    states.iter().map(ProductState::normalized_ket).collect()
}

fn layers(d: usize) -> std::ops::RangeInclusive<usize> {
    1..=(d - 1) / 2
}

fn orthogonality(c: &mut Collector) -> CliResult<()> {
    let (d, v) = (c.cfg.d, c.cfg.variant);
    let upb = tiles::upb(d, v)?;
    let all = upb.all_states();
    c.add("construction.count", "cardinality", Status::Pass, || verify::check_member_count(&upb))?;
    c.add("orthogonality.upb", "orthogonality", Status::Pass, || {
        verify::check_orthogonality(&all, tol::CONSTRUCTION)
    })?;
    let mut control = all.clone();
    control.push(tiles::missing_states(&tiles::layout(d)?).remove(0));
    c.add("orthogonality.control", "orthogonality", Status::Fail, || {
        verify::check_orthogonality(&control, tol::CONSTRUCTION)
    })?;
    let copb = tiles::copb(d, v)?;
    c.add("completeness.copb", "completeness", Status::Pass, || verify::check_completeness(&copb, d))?;
    c.add("completeness.upb", "completeness", Status::Fail, || verify::check_completeness(&all, d))?;
    Ok(())
}

/// An exhaustive search that ran out of budget takes its status from the
/// product search on `space`, at evidence level.
fn downgrade_if_exhausted(
    mut cert: Certificate,
    space: &tileupb::Subspace,
    d: usize,
    seesaw: &tileupb::SeesawConfig,
) -> tileupb::Result<Certificate> {
    if cert.status == Status::Inconclusive {
        let fallback = verify::search_product_in_subspace(space, d, d, seesaw)?;
        cert.status = fallback.status;
        cert.confidence = Confidence::Evidence;
        cert.witnesses["downgraded"] = json!("node budget exhausted; status taken from the product search");
        cert.witnesses["search"] = fallback.witnesses;
    }
    Ok(cert)
}

fn unextendible(c: &mut Collector) -> CliResult<()> {
    let (d, v) = (c.cfg.d, c.cfg.variant);
    let seesaw = c.cfg.seesaw.clone();
    let budget = c.cfg.budget;
    let upb = tiles::upb(d, v)?;
    let he = states::entangled_subspace(&upb);
    c.add("unextendible.exhaustive", "unextendibility", Status::Pass, || {
        let cert = verify::check_upb_unextendible(&upb, budget)?;
        downgrade_if_exhausted(cert, &he, d, &seesaw)
    })?;
    c.add("unextendible.seesaw", "unextendibility", Status::Pass, || {
        verify::search_product_in_subspace(&he, d, d, &seesaw)
    })?;
    let control = verify::extendible_control_set(d, v)?;
    let control_space = orthonormal_complement(&kets(&control), d * d);
    c.add("unextendible.control", "unextendibility", Status::Fail, || {
        let cert = verify::check_unextendible_exhaustive(&control, budget)?;
        downgrade_if_exhausted(cert, &control_space, d, &seesaw)
    })?;
    c.add("unextendible.control-seesaw", "unextendibility", Status::Fail, || {
        verify::search_product_in_subspace(&control_space, d, d, &seesaw)
    })?;
    Ok(())
}

fn ppt(c: &mut Collector) -> CliResult<()> {
    let (d, v) = (c.cfg.d, c.cfg.variant);
    let tol_ppt = c.cfg.tol_ppt;
    let rho = states::rho_d(d, v)?;
    let spectrum = [(0.0, (d - 1) * (d - 1) + 1), (1.0 / (2.0 * (d - 1) as f64), 2 * (d - 1))];
    c.add("ppt.rho", "ppt", Status::Pass, || verify::check_ppt(&rho, tol_ppt))?;
    c.add("ppt.rho.spectrum", "pt-spectrum", Status::Pass, || verify::check_pt_spectrum(&rho, &spectrum, tol_ppt))?;
    for m in layers(d) {
        let sf = states::sigma(d, m)?;
        c.add(format!("ppt.sigma.m{m}"), "ppt", Status::Pass, || verify::check_ppt(&sf.state, tol_ppt))?;
        c.add(format!("ppt.sigma.m{m}.spectrum"), "pt-spectrum", Status::Pass, || {
            verify::check_pt_spectrum(&sf.state, &[(0.0, d * d - 4), (0.25, 4)], tol_ppt)
        })?;
    }
    if let Some(p) = c.cfg.inject_unequal {
        let rho = states::rho3_unequal(&p)?;
        c.add("ppt.rho3-unequal", "npt-mixture", Status::Fail, || verify::check_ppt(&rho, tol_ppt))?;
    }
    Ok(())
}

fn decomposition(c: &mut Collector) -> CliResult<()> {
    let (d, v) = (c.cfg.d, c.cfg.variant);
    let rho = states::rho_d(d, v)?;
    c.add("rank.rho", "rank", Status::Pass, || verify::check_rank(&rho, 2 * (d - 1)))?;
    for m in layers(d) {
        let sf = states::sigma(d, m)?;
        c.add(format!("rank.sigma.m{m}"), "rank", Status::Pass, || verify::check_rank(&sf.state, 4))?;
    }
    c.add("decomposition", "decomposition", Status::Pass, || verify::check_decomposition(d, v))?;
    c.add("entangled-basis", "entangled-basis", Status::Pass, || verify::check_entangled_basis(d, v))?;
    if d == 5 {
        c.add("cardinality.bound", "cardinality-bound", Status::Pass, || verify::check_cardinality_constraint(5))?;
    }
    Ok(())
}

fn extreme(c: &mut Collector) -> CliResult<()> {
    let (d, v) = (c.cfg.d, c.cfg.variant);
    for m in layers(d) {
        let sf = states::sigma(d, m)?;
        c.add(format!("extreme.sigma.m{m}"), "extremality", Status::Pass, || verify::check_extreme_rank4(&sf))?;
    }
    let rho = states::rho_d(d, v)?;
    let expected = if d == 3 { Status::Pass } else { Status::Fail };
    c.add("extreme.rho", "extremality", expected, || verify::check_extreme_rank4_state(&rho, None))?;
    Ok(())
}

/// Number of sampled family members checked per run.
const FAMILY_SAMPLES: usize = 3;

fn edge(c: &mut Collector) -> CliResult<()> {
    let (d, v) = (c.cfg.d, c.cfg.variant);
    let seesaw = c.cfg.seesaw.clone();
    let rho = states::rho_d(d, v)?;
    c.add("edge.rho", "edge", Status::Pass, || verify::check_edge(&rho, &seesaw))?;
    for m in layers(d) {
        let sf = states::sigma(d, m)?;
        c.add(format!("edge.sigma.m{m}"), "edge", Status::Pass, || verify::check_edge(&sf.state, &seesaw))?;
    }
    if d >= 5 {
        let samples = verify::sample_probabilities((d - 1) / 2, FAMILY_SAMPLES, c.cfg.seed);
        for (i, p) in samples.iter().enumerate() {
            let family: DensityMatrix = states::sigma_family(d, p)?;
            c.add(format!("edge.family.{i}"), "edge", Status::Pass, || verify::check_edge(&family, &seesaw))?;
        }
    }
    let mixed = DensityMatrix::maximally_mixed(d, d);
    c.add("edge.control", "edge", Status::Fail, || verify::check_edge(&mixed, &seesaw))?;
    Ok(())
}

fn discrimination(c: &mut Collector) -> CliResult<()> {
    let (d, v) = (c.cfg.d, c.cfg.variant);
    if d < 5 {
        return Ok(());
    }
    let seesaw = c.cfg.seesaw.clone();
    let ucpb: StateSet = discrimination::ucpb_set(d, v)?;
    let completable: StateSet = discrimination::completable_set(d, v)?;
    c.add("discrimination.ucpb", "strong-indistinguishability", Status::Pass, || {
        discrimination::check_strong_indistinguishability(&ucpb)
    })?;
    c.add("discrimination.completable", "strong-indistinguishability", Status::Pass, || {
        discrimination::check_strong_indistinguishability(&completable)
    })?;
    c.add("completability.completable", "completability", Status::Pass, || {
        discrimination::check_completability(&completable, v, &seesaw)
    })?;
    c.add("completability.ucpb", "completability", Status::Fail, || {
        discrimination::check_completability(&ucpb, v, &seesaw)
    })?;
    Ok(())
}

/// Runs `suite` and returns the report with entries sorted by id.
pub fn run(cfg: &RunConfig, suite: Suite) -> CliResult<Report> {
    let mut c = Collector { cfg, entries: Vec::new() };
    let all = suite == Suite::All;
    if all || suite == Suite::Orthogonality {
        orthogonality(&mut c)?;
    }
    if all || suite == Suite::Unextendible {
        unextendible(&mut c)?;
    }
    if all || suite == Suite::Ppt {
        ppt(&mut c)?;
    }
    if all || suite == Suite::Decomposition {
        decomposition(&mut c)?;
    }
    if all || suite == Suite::Extreme {
        extreme(&mut c)?;
    }
    if all || suite == Suite::Edge {
        edge(&mut c)?;
    }
    if all || suite == Suite::Discrimination {
        discrimination(&mut c)?;
    }
    let mut entries = c.entries;
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let summary = summarize(&entries);
    Ok(Report {
        d: cfg.d,
        variant: cfg.variant,
        seed: cfg.seed,
        suite: suite.name().into(),
        config: json!({
            "budget": cfg.budget,
            "seesaw": cfg.seesaw.to_json(),
            "tol_ppt": cfg.tol_ppt,
            "inject_unequal": cfg.inject_unequal,
        }),
        entries,
        summary,
    })
}
