//! Command-line front end: parse scenes, run symbol, reciprocity and
//! commutator computations, emit human-readable or JSON reports.
//!
//! Exit codes: 0 success / verdict true, 1 verdict false, 2 parse errors,
//! 3 unsupported geometry, 4 precision exhausted, 5 internal errors.

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use tamesym::central_ext::{
    commutator_of_lifts, restriction_check, splitting_certificate, MonomialMatrix, SubgroupSpec,
    SymbolCocycle,
};
use tamesym::engine::{engine_by_name, SymbolEngine};
use tamesym::error::Error;
use tamesym::gfield::Fq;
use tamesym::graded::{c3_det_certified, one_tate_commutator_certified};
use tamesym::laurent::{two_local_const, TSeries};
use tamesym::parse::{parse_field_element, parse_rational, parse_series};
use tamesym::reciprocity::{
    along_curve, around_point, global_product, weil_on_curve, SymbolReport,
};
use tamesym::surface::{poly::Poly2, ClosedPoint, Curve, RationalFunction};
use tamesym::symbols::{kummer_galois_order, kummer_map};

#[derive(Parser)]
#[command(
    name = "tamesym",
    about = "Exact two-dimensional tame symbols and reciprocity laws on the projective plane",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Field order q = p^d (prime power; default modulus); e.g. 5, 9, 25.
    #[arg(long)]
    field: Option<u64>,
    /// Override modulus, little-endian coefficients "c0,c1,...,1".
    #[arg(long)]
    modulus: Option<String>,
    /// Load defaults from a TOML scene file; explicit flags override.
    #[arg(long)]
    scene: Option<String>,
    /// Emit the machine-readable JSON report.
    #[arg(long)]
    json: bool,
    /// Seed for sampled certificates.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Precision cap for series windows and determinant stabilization.
    #[arg(long)]
    precision_cap: Option<usize>,
    /// Symbol backend: "formula" or "detline".
    #[arg(long, default_value = "formula")]
    engine: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Two-dimensional tame symbol (f, g, h) of series in u, t.
    Symbol2 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        h: Option<String>,
    },
    /// One-dimensional tame symbol (f, g) of series in u.
    Tame1 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
    },
    /// Kummer reciprocity map value (f, g, a)^{(q-1)/m} and the Galois order.
    Kummer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        m: Option<u64>,
    },
    /// Triple commutator of the graded determinant construction.
    C3 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        h: Option<String>,
    },
    /// Reciprocity around a point for rational functions f, g, a.
    Point {
        #[command(flatten)]
        common: Common,
        /// Point coordinates "x,y" in the base field (chart 0).
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        a: Option<String>,
    },
    /// Reciprocity along a projective curve.
    Curve {
        #[command(flatten)]
        common: Common,
        /// Curve equation in x, y, or "infinity".
        #[arg(long)]
        curve: Option<String>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        a: Option<String>,
    },
    /// Global reciprocity over all supporting curves.
    Global {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        a: Option<String>,
    },
    /// Weil reciprocity of two functions restricted to a curve.
    Weil {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        curve: Option<String>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
    },
    /// Commutator of lifts of diag(y,1,...) and diag(1,x,1,...) in GL_n.
    Commutator {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Entry of the first diagonal matrix (series in u, t).
        #[arg(long)]
        y: Option<String>,
        /// Entry of the second diagonal matrix (series in u, t).
        #[arg(long)]
        x: Option<String>,
        /// Cocycle datum (series in u, t).
        #[arg(long)]
        a: Option<String>,
        /// Also verify the upper-left corner restriction GL_m in GL_n.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Splitting certificate over a point, curve or global subgroup.
    Certify {
        #[command(flatten)]
        common: Common,
        /// Subgroup kind: point | curve | global.
        #[arg(long)]
        sub: Option<String>,
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        curve: Option<String>,
        /// Cocycle datum, a rational function in x, y.
        #[arg(long)]
        a: Option<String>,
        /// Extra generators (rational functions), comma-separated.
        #[arg(long)]
        gens: Option<String>,
    },
}

/// Scene file: TOML key/value defaults for any command.
#[derive(Deserialize, Default)]
struct Scene {
    field: Option<u64>,
    modulus: Option<String>,
    query: Option<String>,
    f: Option<String>,
    g: Option<String>,
    h: Option<String>,
    a: Option<String>,
    m: Option<u64>,
    n: Option<usize>,
    x: Option<String>,
    y: Option<String>,
    point: Option<String>,
    curve: Option<String>,
    sub: Option<String>,
    gens: Option<String>,
    seed: Option<u64>,
    precision_cap: Option<usize>,
    engine: Option<String>,
}

#[derive(Serialize)]
struct ValueReport {
    query: String,
    field: u64,
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    galois_order: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilization_window: Option<usize>,
    engine: String,
    seed: u64,
    precision_cap: usize,
}

fn main() {
    // die quietly when the read end of a pipe closes (e.g. `... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    });
}

struct Ctx {
    fq: Fq,
    engine: &'static dyn SymbolEngine,
    json: bool,
    seed: u64,
    cap: usize,
    scene: Scene,
}

fn load_scene(common: &Common) -> Result<Scene, Error> {
    match &common.scene {
        None => Ok(Scene::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read scene {path}: {e}")))?;
            toml::from_str(&text).map_err(|e| Error::Parse(format!("scene {path}: {e}")))
        }
    }
}

fn context(common: &Common, expect_query: &str) -> Result<Ctx, Error> {
    let scene = load_scene(common)?;
    if let Some(q) = &scene.query {
        if q != expect_query {
            return Err(Error::Parse(format!(
                "scene query '{q}' does not match subcommand '{expect_query}'"
            )));
        }
    }
    let order = common.field.or(scene.field).unwrap_or(5);
    let modulus = common.modulus.clone().or_else(|| scene.modulus.clone());
    let fq = match modulus {
        Some(m) => {
            let coeffs: Result<Vec<u64>, _> =
                m.split(',').map(|s| s.trim().parse::<u64>()).collect();
            let coeffs = coeffs.map_err(|_| Error::Parse(format!("bad modulus '{m}'")))?;
            // the characteristic is the smallest prime factor of the order
            let p = (2..=order)
                .find(|k| order.is_multiple_of(*k))
                .unwrap_or(order);
            Fq::with_modulus(p, &coeffs)?
        }
        None => Fq::from_order(order)?,
    };
    let engine_name = if common.engine != "formula" {
        common.engine.clone()
    } else {
        scene
            .engine
            .clone()
            .unwrap_or_else(|| common.engine.clone())
    };
    let engine = engine_by_name(&engine_name)?;
    Ok(Ctx {
        fq,
        engine,
        json: common.json,
        seed: if common.seed != 0 {
            common.seed
        } else {
            scene.seed.unwrap_or(0)
        },
        cap: common
            .precision_cap
            .or(scene.precision_cap)
            .unwrap_or(tamesym::laurent::DEFAULT_CAP),
        scene,
    })
}

fn required(name: &str, flag: Option<String>, scene: Option<&String>) -> Result<String, Error> {
    flag.or_else(|| scene.cloned())
        .ok_or_else(|| Error::Parse(format!("missing required argument --{name}")))
}

fn series_arg(
    ctx: &Ctx,
    name: &str,
    flag: Option<String>,
    scene: Option<&String>,
) -> Result<TSeries, Error> {
    let text = required(name, flag, scene)?;
    Ok(parse_series(&ctx.fq, &text)?.with_cap(ctx.cap))
}

fn rational_arg(
    ctx: &Ctx,
    name: &str,
    flag: Option<String>,
    scene: Option<&String>,
) -> Result<RationalFunction, Error> {
    let text = required(name, flag, scene)?;
    parse_rational(&ctx.fq, &text)
}

fn curve_arg(ctx: &Ctx, text: &str) -> Result<Curve, Error> {
    if text == "infinity" || text == "inf" {
        return Ok(Curve::line_at_infinity(&ctx.fq));
    }
    let rf = parse_rational(&ctx.fq, text)?;
    if rf.denominator() != &Poly2::one(&ctx.fq) {
        return Err(Error::Parse("a curve equation must be polynomial".into()));
    }
    Curve::from_affine(rf.numerator())
}

fn point_arg(ctx: &Ctx, text: &str) -> Result<ClosedPoint, Error> {
    let parts: Vec<&str> = text
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "bad point '{text}', expected \"x,y\""
        )));
    }
    let x = parse_field_element(&ctx.fq, parts[0].trim())?;
    let y = parse_field_element(&ctx.fq, parts[1].trim())?;
    ClosedPoint::rational(&ctx.fq, x, y)
}

fn emit_report(ctx: &Ctx, rep: &SymbolReport) -> Result<i32, Error> {
    if ctx.json {
        println!(
            "{}",
            serde_json::to_string_pretty(rep).map_err(|e| Error::Parse(e.to_string()))?
        );
    } else {
        print!("{}", rep.to_text());
    }
    Ok(if rep.verdict { 0 } else { 1 })
}

fn emit_value(ctx: &Ctx, rep: &ValueReport) -> Result<i32, Error> {
    if ctx.json {
        println!(
            "{}",
            serde_json::to_string_pretty(rep).map_err(|e| Error::Parse(e.to_string()))?
        );
    } else {
        println!("{}", rep.value);
        if let Some(l) = rep.galois_order {
            println!("galois order l = {l}");
        }
        if let Some(w) = rep.stabilization_window {
            println!("stabilized at window {w}");
        }
    }
    Ok(0)
}

fn value_report(ctx: &Ctx, query: &str, value: String) -> ValueReport {
    ValueReport {
        query: query.into(),
        field: ctx.fq.order(),
        value,
        galois_order: None,
        stabilization_window: None,
        engine: ctx.engine.name().into(),
        seed: ctx.seed,
        precision_cap: ctx.cap,
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.cmd {
        Cmd::Symbol2 { common, f, g, h } => {
            let ctx = context(&common, "symbol2")?;
            let sf = series_arg(&ctx, "f", f, ctx.scene.f.as_ref())?;
            let sg = series_arg(&ctx, "g", g, ctx.scene.g.as_ref())?;
            let sh = series_arg(&ctx, "h", h, ctx.scene.h.as_ref())?;
            let v = ctx.engine.tame2(&sf, &sg, &sh)?;
            emit_value(&ctx, &value_report(&ctx, "symbol2", v.to_string()))
        }
        Cmd::Tame1 { common, f, g } => {
            let ctx = context(&common, "tame1")?;
            let sf = series_arg(&ctx, "f", f, ctx.scene.f.as_ref())?;
            let sg = series_arg(&ctx, "g", g, ctx.scene.g.as_ref())?;
            let uf = u_layer(&sf)?;
            let ug = u_layer(&sg)?;
            let mut rep = value_report(&ctx, "tame1", String::new());
            let v = if ctx.engine.name() == "detline" {
                let s = one_tate_commutator_certified(&uf, &ug)?;
                rep.stabilization_window = Some(s.window);
                s.value
            } else {
                ctx.engine.tame1(&uf, &ug)?
            };
            rep.value = v.to_string();
            emit_value(&ctx, &rep)
        }
        Cmd::Kummer { common, f, g, a, m } => {
            let ctx = context(&common, "kummer")?;
            let sf = series_arg(&ctx, "f", f, ctx.scene.f.as_ref())?;
            let sg = series_arg(&ctx, "g", g, ctx.scene.g.as_ref())?;
            let sa = series_arg(&ctx, "a", a, ctx.scene.a.as_ref())?;
            let m = m
                .or(ctx.scene.m)
                .ok_or_else(|| Error::Parse("missing required argument --m".into()))?;
            let v = kummer_map(&sf, &sg, &sa, m)?;
            let l = kummer_galois_order(&sa, m)?;
            let mut rep = value_report(&ctx, "kummer", v.to_string());
            rep.galois_order = Some(l);
            emit_value(&ctx, &rep)
        }
        Cmd::C3 { common, f, g, h } => {
            let ctx = context(&common, "c3")?;
            let sf = series_arg(&ctx, "f", f, ctx.scene.f.as_ref())?;
            let sg = series_arg(&ctx, "g", g, ctx.scene.g.as_ref())?;
            let sh = series_arg(&ctx, "h", h, ctx.scene.h.as_ref())?;
            let v = c3_det_certified(&sf, &sg, &sh)?;
            let mut rep = value_report(&ctx, "c3", v.value.to_string());
            rep.stabilization_window = Some(v.window);
            emit_value(&ctx, &rep)
        }
        Cmd::Point {
            common,
            point,
            f,
            g,
            a,
        } => {
            let ctx = context(&common, "point")?;
            let pt = point_arg(&ctx, &required("point", point, ctx.scene.point.as_ref())?)?;
            let rf = rational_arg(&ctx, "f", f, ctx.scene.f.as_ref())?;
            let rg = rational_arg(&ctx, "g", g, ctx.scene.g.as_ref())?;
            let ra = rational_arg(&ctx, "a", a, ctx.scene.a.as_ref())?;
            let rep = around_point(ctx.engine, &pt, &rf, &rg, &ra)?;
            emit_report(&ctx, &rep)
        }
        Cmd::Curve {
            common,
            curve,
            f,
            g,
            a,
        } => {
            let ctx = context(&common, "curve")?;
            let c = curve_arg(&ctx, &required("curve", curve, ctx.scene.curve.as_ref())?)?;
            let rf = rational_arg(&ctx, "f", f, ctx.scene.f.as_ref())?;
            let rg = rational_arg(&ctx, "g", g, ctx.scene.g.as_ref())?;
            let ra = rational_arg(&ctx, "a", a, ctx.scene.a.as_ref())?;
            let rep = along_curve(ctx.engine, &c, &rf, &rg, &ra)?;
            emit_report(&ctx, &rep)
        }
        Cmd::Global { common, f, g, a } => {
            let ctx = context(&common, "global")?;
            let rf = rational_arg(&ctx, "f", f, ctx.scene.f.as_ref())?;
            let rg = rational_arg(&ctx, "g", g, ctx.scene.g.as_ref())?;
            let ra = rational_arg(&ctx, "a", a, ctx.scene.a.as_ref())?;
            let rep = global_product(ctx.engine, &rf, &rg, &ra)?;
            emit_report(&ctx, &rep)
        }
        Cmd::Weil {
            common,
            curve,
            f,
            g,
        } => {
            let ctx = context(&common, "weil")?;
            let c = curve_arg(&ctx, &required("curve", curve, ctx.scene.curve.as_ref())?)?;
            let rf = rational_arg(&ctx, "f", f, ctx.scene.f.as_ref())?;
            let rg = rational_arg(&ctx, "g", g, ctx.scene.g.as_ref())?;
            let rep = weil_on_curve(ctx.engine, &c, &rf, &rg)?;
            emit_report(&ctx, &rep)
        }
        Cmd::Commutator {
            common,
            n,
            y,
            x,
            a,
            m,
        } => {
            let ctx = context(&common, "commutator")?;
            let n = if n != 2 { n } else { ctx.scene.n.unwrap_or(2) };
            if n < 2 {
                return Err(Error::Parse("need n >= 2".into()));
            }
            let sy = series_arg(&ctx, "y", y, ctx.scene.y.as_ref())?;
            let sx = series_arg(&ctx, "x", x, ctx.scene.x.as_ref())?;
            let sa = series_arg(&ctx, "a", a, ctx.scene.a.as_ref())?;
            let c = SymbolCocycle::from_series(sa);
            let one = two_local_const(ctx.fq.one());
            let mut dy = vec![one.clone(); n];
            dy[0] = sy;
            let mut dx = vec![one.clone(); n];
            dx[1] = sx;
            let g1 = MonomialMatrix::diagonal(dy)?;
            let g2 = MonomialMatrix::diagonal(dx)?;
            let v = commutator_of_lifts(&g1, &g2, &c)?;
            let mut ok = true;
            if let Some(m) = m {
                ok = restriction_check(n, m, &c, ctx.seed)?;
            }
            let rep = value_report(&ctx, "commutator", v.to_string());
            let code = emit_value(&ctx, &rep)?;
            Ok(if ok { code } else { 1 })
        }
        Cmd::Certify {
            common,
            sub,
            point,
            curve,
            a,
            gens,
        } => {
            let ctx = context(&common, "certify")?;
            let sub = required("sub", sub, ctx.scene.sub.as_ref())?;
            let ra = rational_arg(&ctx, "a", a, ctx.scene.a.as_ref())?;
            let spec = match sub.as_str() {
                "point" => SubgroupSpec::Point(point_arg(
                    &ctx,
                    &required("point", point, ctx.scene.point.as_ref())?,
                )?),
                "curve" => SubgroupSpec::Curve(curve_arg(
                    &ctx,
                    &required("curve", curve, ctx.scene.curve.as_ref())?,
                )?),
                "global" => SubgroupSpec::Global,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown subgroup '{other}' (point|curve|global)"
                    )))
                }
            };
            let gens_list: Option<Vec<RationalFunction>> =
                match gens.or_else(|| ctx.scene.gens.clone()) {
                    None => None,
                    Some(text) => {
                        let mut v = Vec::new();
                        for part in text.split(',') {
                            v.push(parse_rational(&ctx.fq, part.trim())?);
                        }
                        Some(v)
                    }
                };
            let rep = splitting_certificate(ctx.engine, &spec, &ra, gens_list.as_deref())?;
            emit_report(&ctx, &rep)
        }
    }
}

/// Extract the u-layer of a series expression without t-terms.
fn u_layer(s: &TSeries) -> Result<tamesym::laurent::USeries, Error> {
    let n = s.normalized()?;
    if n.is_exact_zero() {
        return Err(Error::ZeroInput("tame1 arguments must be nonzero"));
    }
    if !n.is_exact() || n.valuation()? != 0 || n.window().1.len() != 1 {
        return Err(Error::Parse(
            "tame1 expects series in u only (no t terms)".into(),
        ));
    }
    n.coeff_at(0)
}
