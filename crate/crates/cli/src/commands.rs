//! Command implementations: each runs one pipeline stage and emits a CSV.

use crate::config::RunConfig;
use crate::output::{CsvDoc, Field};
use anyhow::{anyhow, Result};
use resonance_core::agmon::{agmon_summary, interior_boundary_distances};
use resonance_core::decoupled::decoupled_spectra;
use resonance_core::eigensolve::solve_lowest;
use resonance_core::error::Error as CoreError;
use resonance_core::semiclassics::{resonance_report, run_scaling_study};
use resonance_core::sweep::{
    classify_branches, detect_avoided_crossings, refine_gap, sweep_eigenvalues,
};
use resonance_core::wkb::predict_exterior_eigenvalue;
use resonance_core::Side;
use std::path::Path;

pub struct CommandCtx<'a> {
    pub cfg: &'a RunConfig,
    pub out_dir: &'a Path,
    pub timestamp: Option<String>,
}

impl CommandCtx<'_> {
    fn doc(&self, columns: &str) -> CsvDoc {
        CsvDoc::new(self.cfg, columns, self.timestamp.clone())
    }

    fn finish(&self, doc: CsvDoc, name: &str) -> Result<()> {
        let path = doc.write_to(self.out_dir, name)?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}

/// Keep core error kinds visible to the exit-code mapping.
pub fn core_err(e: CoreError) -> anyhow::Error {
    anyhow::Error::new(e)
}

pub fn spectrum(ctx: &CommandCtx) -> Result<()> {
    let cfg = ctx.cfg;
    let model = cfg.model()?;
    let g = cfg.geometry()?;
    let policy = cfg.policy();
    let w = solve_lowest(&model, (-g.ell, g.ell), cfg.numerics.hbar, cfg.sweep.k, &policy)
        .map_err(core_err)?;
    let mut doc = ctx.doc("index,energy");
    for (i, e) in w.iter().enumerate() {
        doc.row(&[Field::U(i), Field::F(*e)]);
    }
    ctx.finish(doc, "spectrum.csv")
}

pub fn decoupled(ctx: &CommandCtx) -> Result<()> {
    let cfg = ctx.cfg;
    let model = cfg.model()?;
    let g = cfg.geometry()?;
    let policy = cfg.policy();
    let k = cfg.sweep.k;
    let s = decoupled_spectra(&model, &g, cfg.numerics.hbar, k, k, &policy).map_err(core_err)?;
    let mut doc = ctx.doc("family,index,energy");
    for (i, e) in s.interior.iter().enumerate() {
        doc.row(&[Field::S("interior"), Field::U(i), Field::F(*e)]);
    }
    for (i, e) in s.exterior_left.iter().enumerate() {
        doc.row(&[Field::S("exterior_left"), Field::U(i), Field::F(*e)]);
    }
    for (i, e) in s.exterior_right.iter().enumerate() {
        doc.row(&[Field::S("exterior_right"), Field::U(i), Field::F(*e)]);
    }
    ctx.finish(doc, "decoupled.csv")
}

pub fn agmon(ctx: &CommandCtx) -> Result<()> {
    let cfg = ctx.cfg;
    let model = cfg.model()?;
    let g = cfg.geometry()?;
    let m = agmon_summary(&model, &g).map_err(core_err)?;
    let (dm, dp) = interior_boundary_distances(&model, &g).map_err(core_err)?;
    let mut doc = ctx.doc("d_minus,d_plus,d_star,d_omega_minus,d_omega_plus");
    doc.row(&[
        Field::F(m.d_minus),
        Field::F(m.d_plus),
        Field::F(m.d_star),
        Field::F(dm),
        Field::F(dp),
    ]);
    ctx.finish(doc, "agmon.csv")
}

fn swept_branches(cfg: &RunConfig) -> Result<resonance_core::BranchSet> {
    let model = cfg.model()?;
    let g = cfg.geometry()?;
    let policy = cfg.policy();
    let mut b = sweep_eigenvalues(
        &model,
        &g,
        cfg.numerics.hbar,
        (cfg.sweep.ell_min, cfg.sweep.ell_max),
        cfg.sweep.n_ell,
        cfg.sweep.k,
        &policy,
    )
    .map_err(core_err)?;
    classify_branches(&model, &g, cfg.numerics.hbar, &policy, &mut b).map_err(core_err)?;
    Ok(b)
}

pub fn sweep(ctx: &CommandCtx) -> Result<()> {
    let b = swept_branches(ctx.cfg)?;
    let mut doc = ctx.doc("ell,slot,energy,classification");
    for (i, &ell) in b.ell_grid.iter().enumerate() {
        for s in 0..b.k {
            doc.row(&[
                Field::F(ell),
                Field::U(s),
                Field::F(b.energies[s][i]),
                Field::S(b.classification[s][i].label()),
            ]);
        }
    }
    ctx.finish(doc, "sweep.csv")
}

pub fn crossings(ctx: &CommandCtx) -> Result<()> {
    let cfg = ctx.cfg;
    let model = cfg.model()?;
    let g = cfg.geometry()?;
    let policy = cfg.policy();
    let iso = cfg.isolation();
    let b = swept_branches(cfg)?;
    let candidates = detect_avoided_crossings(&b);
    let refined: Vec<_> = {
        use rayon::prelude::*;
        candidates
            .par_iter()
            .map(|cand| refine_gap(&model, &g, cfg.numerics.hbar, &policy, cand, &iso))
            .collect()
    };
    let mut doc = ctx.doc("ell_star,center_energy,gap,side,interior_index,delta,agmon_d");
    for (cand, outcome) in candidates.iter().zip(refined) {
        match outcome {
            Ok(rep) if !rep.isolation_flagged => {
                doc.row(&[
                    Field::F(rep.ell_star),
                    Field::F(rep.center_energy),
                    Field::F(rep.gap),
                    Field::S(rep.side.label()),
                    Field::U(rep.interior_index),
                    Field::F(rep.delta_isolation),
                    Field::F(rep.agmon_prediction),
                ]);
            }
            Ok(rep) => {
                doc.comment(&format!(
                    "flagged: ell_star={} gap={} delta={} below isolation threshold",
                    rep.ell_star, rep.gap, rep.delta_isolation
                ));
            }
            Err(e) => {
                doc.comment(&format!(
                    "refinement failed near ell={}: {e}",
                    cand.bracket.1
                ));
            }
        }
    }
    ctx.finish(doc, "crossings.csv")
}

pub fn wkb(ctx: &CommandCtx) -> Result<()> {
    let cfg = ctx.cfg;
    let model = cfg.model()?;
    let g = cfg.geometry()?;
    let policy = cfg.policy();
    let hbar = cfg.numerics.hbar;
    let mut doc = ctx.doc("side,n,E_wkb,E_numeric,abs_err");
    for side in [Side::Left, Side::Right] {
        let numeric = resonance_core::decoupled::exterior_spectrum(
            &model,
            &g,
            hbar,
            side,
            cfg.study.wkb_n_max + 1,
            &policy,
        )
        .map_err(core_err)?;
        for n in 0..=cfg.study.wkb_n_max {
            match predict_exterior_eigenvalue(&model, &g, hbar, side, n) {
                Ok(e_wkb) => {
                    let e_num = numeric[n];
                    doc.row(&[
                        Field::S(side.label()),
                        Field::U(n),
                        Field::F(e_wkb),
                        Field::F(e_num),
                        Field::F((e_wkb - e_num).abs()),
                    ]);
                }
                Err(e) => {
                    doc.comment(&format!("{} n={n}: {e}", side.label()));
                    break;
                }
            }
        }
    }
    ctx.finish(doc, "wkb.csv")
}

pub fn scaling(ctx: &CommandCtx) -> Result<()> {
    let cfg = ctx.cfg;
    let model = cfg.model()?;
    let g = cfg.geometry()?;
    let policy = cfg.policy();
    let iso = cfg.isolation();
    let hbars = cfg.hbar_values();
    if hbars.len() < 4 {
        return Err(anyhow!(
            "scaling needs numerics.hbar_list with at least 4 entries"
        ));
    }
    let study = run_scaling_study(
        &model,
        &g,
        cfg.observable(),
        &hbars,
        cfg.study.interior_index,
        (cfg.sweep.ell_min, cfg.sweep.ell_max),
        &policy,
        &iso,
    )
    .map_err(core_err)?;
    let mut doc = ctx.doc("hbar,inv_hbar,observable,value,log_value,ell_star,delta");
    for r in &study.rows {
        doc.row(&[
            Field::F(r.hbar),
            Field::F(1.0 / r.hbar),
            Field::S(study.observable.label()),
            Field::F(r.value),
            Field::F(r.value.ln()),
            Field::F(r.ell_star),
            Field::F(r.delta_isolation),
        ]);
    }
    doc.comment(&format!("fitted_slope = {}", study.fitted_slope));
    doc.comment(&format!("intercept = {}", study.intercept));
    doc.comment(&format!("r_squared = {}", study.r_squared));
    doc.comment(&format!("agmon_reference = {}", study.agmon_reference));
    doc.comment(&format!("slope_ratio = {}", study.slope_ratio));
    ctx.finish(doc, "scaling.csv")
}

pub fn report(ctx: &CommandCtx) -> Result<()> {
    let cfg = ctx.cfg;
    let model = cfg.model()?;
    let g = cfg.geometry()?;
    let policy = cfg.policy();
    let iso = cfg.isolation();
    let rows = resonance_report(
        &model,
        &g,
        cfg.numerics.hbar,
        cfg.study.max_levels,
        (cfg.sweep.ell_min, cfg.sweep.ell_max),
        &policy,
        &iso,
    )
    .map_err(core_err)?;
    let mut doc = ctx.doc(
        "interior_index,e_res,e_interior,gap_left,gap_right,t_bound,d_minus,d_plus,width_order",
    );
    for r in &rows {
        doc.row(&[
            Field::U(r.interior_index),
            Field::F(r.e_res),
            Field::F(r.e_interior),
            Field::Opt(r.gap_left),
            Field::Opt(r.gap_right),
            Field::F(r.t_bound),
            Field::F(r.d_minus),
            Field::F(r.d_plus),
            Field::Opt(r.width_order),
        ]);
    }
    ctx.finish(doc, "report.csv")
}

