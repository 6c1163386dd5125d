//! Check families over a corpus. Each family maps corpus items to records
//! in parallel and returns them in corpus order.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use cutpaste::csupport::{
    additivity_check, consistency_check, independence_check, CheckReport, CompactificationProvider, ConsistencyArgs,
    ConsistencyKind, MeasureOnCompacts, ToricCompletion,
};
use cutpaste::kring::{f_map, g_map, normalize, verify_square_relation, CompactificationTable, KClass, RelationSet, VarietyExpr};
use cutpaste::measures::{apply_measure, h_vector, weight_report, MeasureSpec};
use cutpaste::site::{
    check_c_complete, check_dim_compatible, enumerate_simple_covers, is_direct, validate_square, DimVerdict,
    DistinguishedSquare, SitePresentation, SiteObject, SpanMorphism,
};
use cutpaste::toric::{star_subdivide, Fan, ToricObject};
use cutpaste::Error;

use crate::corpus::{Corpus, Named};
use crate::report::{Record, Status};

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub measures: Vec<MeasureOnCompacts>,
    pub depth: usize,
    /// Attach extension traces to passing records too.
    pub trace: bool,
}

impl CheckOptions {
    pub fn new(specs: &[MeasureSpec], depth: usize) -> Self {
        Self {
            measures: specs.iter().map(|&s| MeasureOnCompacts::builtin(s)).collect(),
            depth,
            trace: false,
        }
    }
}

fn par_records<T: Sync>(items: &[T], f: impl Fn(&T) -> Vec<Record> + Sync + Send) -> Vec<Record> {
    items.par_iter().map(f).collect::<Vec<_>>().into_iter().flatten().collect()
}

/// A record from a csupport check. Precondition errors (a measure that is
/// not multiplicative, an unsupported construction) become skips.
pub fn check_record(kind: &str, subject: &str, phi: &MeasureOnCompacts, result: cutpaste::Result<CheckReport>, trace: bool) -> Record {
    match result {
        Ok(r) => {
            let mut rec = Record::pass_if(kind, subject, r.holds).measure(&phi.name).sides(&r.lhs, &r.rhs);
            if let Some(n) = &r.note {
                rec = rec.reason(n);
            }
            if trace || !r.holds {
                rec = rec.trace(serde_json::to_value(&r.trace).expect("trace serializes"));
            }
            rec
        }
        Err(e @ (Error::NotMultiplicative(_) | Error::Unsupported(_))) => {
            Record::new(kind, subject, Status::Skipped).measure(&phi.name).reason(e.to_string())
        }
        Err(e) => Record::new(kind, subject, Status::Fail).measure(&phi.name).reason(e.to_string()),
    }
}

pub fn additivity(c: &Corpus, o: &CheckOptions) -> Vec<Record> {
    let p = CompactificationProvider::default();
    par_records(&c.pairs, |n| {
        let (x, u) = (&n.item.0, &n.item.1);
        o.measures
            .iter()
            .map(|phi| check_record("additivity", &n.name, phi, additivity_check(phi, &x.clone().into(), &u.clone().into(), &p), o.trace))
            .collect()
    })
}

pub fn independence(c: &Corpus, o: &CheckOptions) -> Vec<Record> {
    let auto = CompactificationProvider::default();
    let alt = CompactificationProvider::new(ToricCompletion::Alternative);
    par_records(&c.opens, |n| {
        let obj: SiteObject = n.item.clone().into();
        let choices = auto.compactify(&obj).and_then(|a| Ok((a, alt.compactify(&obj)?)));
        o.measures
            .iter()
            .map(|phi| match &choices {
                Ok((a, b)) => check_record("independence", &n.name, phi, independence_check(phi, &obj, a, b, &auto), o.trace),
                Err(e) => check_record("independence", &n.name, phi, Err(e.clone()), o.trace),
            })
            .collect()
    })
}

fn blowup_squares(c: &Corpus) -> Vec<&Named<crate::corpus::SquareCase>> {
    c.squares.iter().filter(|s| s.item.square.kind.is_blowup()).collect()
}

pub fn blowup_descent(c: &Corpus, o: &CheckOptions) -> Vec<Record> {
    let p = CompactificationProvider::default();
    par_records(&blowup_squares(c), |n| {
        o.measures
            .iter()
            .map(|phi| {
                let r = consistency_check(ConsistencyKind::BlowupDescent, phi, ConsistencyArgs::Square(&n.item.square), &p);
                check_record("blowup_descent", &n.name, phi, r, o.trace)
            })
            .collect()
    })
}

pub fn mayer_vietoris(c: &Corpus, o: &CheckOptions) -> Vec<Record> {
    let p = CompactificationProvider::default();
    par_records(&c.triples, |n| {
        let (x, u, v) = (n.item.0.clone().into(), n.item.1.clone().into(), n.item.2.clone().into());
        o.measures
            .iter()
            .map(|phi| {
                let r = consistency_check(ConsistencyKind::MayerVietoris, phi, ConsistencyArgs::Cover { x: &x, u: &u, v: &v }, &p);
                check_record("mayer_vietoris", &n.name, phi, r, o.trace)
            })
            .collect()
    })
}

pub fn kunneth(c: &Corpus, o: &CheckOptions) -> Vec<Record> {
    let p = CompactificationProvider::default();
    par_records(&c.products, |n| {
        let (x, y) = (n.item.0.clone().into(), n.item.1.clone().into());
        o.measures
            .iter()
            .map(|phi| {
                let r = consistency_check(ConsistencyKind::Kunneth, phi, ConsistencyArgs::Pair { x: &x, y: &y }, &p);
                check_record("kunneth", &n.name, phi, r, o.trace)
            })
            .collect()
    })
}

pub fn relation_record(subject: &str, sq: &DistinguishedSquare, rels: &RelationSet) -> Record {
    match verify_square_relation(sq, rels) {
        Ok(r) => Record::pass_if("square_relation", subject, r.holds).sides(&r.lhs, &r.rhs),
        Err(e) => Record::new("square_relation", subject, Status::Fail).reason(e.to_string()),
    }
}

pub fn validate_record(subject: &str, sq: &DistinguishedSquare) -> Record {
    let r = validate_square(sq);
    let failures: Vec<String> = r.failures().map(|e| format!("{}: {:?}", e.condition, e.status)).collect();
    let rec = Record::pass_if("validate_square", subject, r.passed());
    if failures.is_empty() {
        rec
    } else {
        rec.reason(failures.join("; "))
    }
}

/// Passes if the square is direct, or refined by direct squares.
pub fn dim_record(subject: &str, sq: &DistinguishedSquare) -> Record {
    let kind = "dim_compatible";
    match check_dim_compatible(sq) {
        Ok(DimVerdict::Direct) => Record::new(kind, subject, Status::Pass).reason("direct"),
        Ok(DimVerdict::Refined(v)) => {
            let ok = v.iter().all(is_direct);
            Record::pass_if(kind, subject, ok).reason(format!("refined into {} squares", v.len()))
        }
        Ok(DimVerdict::Fail(why)) => Record::new(kind, subject, Status::Fail).reason(why),
        Err(e) => Record::new(kind, subject, Status::Fail).reason(e.to_string()),
    }
}

pub fn c_complete_record(subject: &str, site: &SitePresentation, sq: &DistinguishedSquare, f: &SpanMorphism, depth: usize) -> Record {
    let v = check_c_complete(site, sq, f, depth);
    Record::pass_if("c_complete", subject, v.found()).trace(serde_json::to_value(&v).expect("verdict serializes"))
}

/// `[E] + [X] = [C] + [Y]` on every star-subdivision square.
pub fn square_relation(c: &Corpus) -> Vec<Record> {
    let rels = RelationSet::new();
    let subs: Vec<&Named<crate::corpus::SquareCase>> = c.squares.iter().filter(|s| c.subdivisions.contains(&s.name)).collect();
    par_records(&subs, |n| vec![relation_record(&n.name, &n.item.square, &rels)])
}

pub fn square_validity(c: &Corpus) -> Vec<Record> {
    par_records(&c.squares, |n| vec![validate_record(&n.name, &n.item.square)])
}

pub fn dim_compatible(c: &Corpus) -> Vec<Record> {
    par_records(&c.squares, |n| vec![dim_record(&n.name, &n.item.square)])
}

fn site_for(sq: &DistinguishedSquare) -> SitePresentation {
    let mut site = SitePresentation::new();
    site.add_square(sq.clone());
    site
}

pub fn c_complete(c: &Corpus, depth: usize) -> Vec<Record> {
    par_records(&c.squares, |n| {
        let site = site_for(&n.item.square);
        n.item
            .morphisms
            .iter()
            .map(|m| c_complete_record(&format!("{} <- {}", n.name, m.name), &site, &n.item.square, &m.item, depth))
            .collect()
    })
}

/// Two stacked blowups of each smooth surface; covers of the base and of
/// the first blowup are enumerated at every depth up to `depth`.
pub fn cover_enumeration(c: &Corpus, depth: usize) -> Vec<Record> {
    let surfaces: Vec<&Named<Arc<Fan>>> = c.fans.iter().filter(|f| f.item.rank() == 2).collect();
    par_records(&surfaces, |n| {
        let f = &n.item;
        let first = star_subdivide(f, &ray_sum(f)).expect("interior ray");
        let second = star_subdivide(&first.fan, &ray_sum(&first.fan)).expect("interior ray");
        let mut site = SitePresentation::new();
        site.add_square(first.square.clone());
        site.add_square(second.square.clone());
        [first.square.x.clone(), first.square.y.clone()]
            .iter()
            .map(|obj| {
                let mut prev: BTreeSet<String> = BTreeSet::new();
                let mut problems = Vec::new();
                let mut sizes = Vec::new();
                for d in 0..=depth {
                    let covers = enumerate_simple_covers(&site, obj, d);
                    let keys: BTreeSet<String> = covers.iter().map(|c| c.key()).collect();
                    if !prev.is_subset(&keys) {
                        problems.push(format!("depth {d} lost covers"));
                    }
                    if covers.iter().any(|c| c.is_jointly_surjective() == Some(false)) {
                        problems.push(format!("depth {d}: a cover is not jointly surjective"));
                    }
                    if covers.iter().any(|c| !c.replays()) {
                        problems.push(format!("depth {d}: a cover does not replay"));
                    }
                    sizes.push(keys.len());
                    prev = keys;
                }
                let subject = format!("{}:{}", n.name, if obj == &first.square.x { "X" } else { "Y" });
                let sizes: Vec<String> = sizes.iter().map(usize::to_string).collect();
                let mut rec = Record::pass_if("cover_enumeration", &subject, problems.is_empty()).sides(sizes.join(","), "monotone");
                if !problems.is_empty() {
                    rec = rec.reason(problems.join("; "));
                }
                rec
            })
            .collect()
    })
}

/// Sum of the rays of the first top-dimensional cone.
fn ray_sum(f: &Fan) -> Vec<i64> {
    let c = (0..f.num_cones()).find(|&c| f.cone(c).dim() == f.rank()).expect("full cone");
    let rays = f.cone_vectors(f.cone(c));
    (0..f.rank()).map(|k| rays.iter().map(|r| r[k]).sum()).collect()
}

/// All fans of the corpus: the whole fans, then the fans of the opens.
fn all_fans(c: &Corpus) -> Vec<Named<Arc<Fan>>> {
    let mut out: Vec<Named<Arc<Fan>>> = c.fans.clone();
    out.extend(c.opens.iter().map(|o| Named { name: o.name.clone(), item: o.item.fan().clone() }));
    out
}

/// `Σ_σ (q - 1)^(n - dim σ)`, straight from the cones.
pub fn orbit_count(f: &Fan, q: u32) -> BigInt {
    let n = f.rank();
    f.cones().iter().map(|c| BigInt::from(q - 1).pow((n - c.dim()) as u32)).sum()
}

pub fn point_count_oracle(c: &Corpus) -> Vec<Record> {
    par_records(&all_fans(c), |n| {
        let class = ToricObject::whole(n.item.clone()).class();
        let e = apply_measure(MeasureSpec::EPoly, &class).expect("Lefschetz polynomial");
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for q in 2..=5u32 {
            lhs.push(e.specialize(&BigInt::from(q)).expect("e_poly value"));
            rhs.push(orbit_count(&n.item, q));
        }
        let fmt = |v: &[BigInt]| v.iter().map(BigInt::to_string).collect::<Vec<_>>().join(",");
        vec![Record::pass_if("point_count", &n.name, lhs == rhs).sides(fmt(&lhs), fmt(&rhs))]
    })
}

pub fn weight_purity(c: &Corpus) -> Vec<Record> {
    let smooth: Vec<&Named<Arc<Fan>>> = c
        .fans
        .iter()
        .filter(|f| f.item.rank() <= 3 && f.item.is_complete() && f.item.is_smooth())
        .collect();
    let e = MeasureOnCompacts::builtin(MeasureSpec::EPoly);
    let p = CompactificationProvider::default();
    par_records(&smooth, |n| {
        let obj: SiteObject = ToricObject::whole(n.item.clone()).into();
        let rec = cutpaste::csupport::extend_measure(&e, &obj, &p).and_then(|r| {
            let w = weight_report(&obj, &r.value)?;
            let h = h_vector(&n.item);
            let coeffs: Vec<BigInt> = (0..h.len()).map(|k| w.weights.iter().find(|x| x.weight == 2 * k).map(|x| x.coeff.clone()).unwrap_or_default()).collect();
            let ok = w.purity == Some(true) && coeffs == h;
            let fmt = |v: &[BigInt]| v.iter().map(BigInt::to_string).collect::<Vec<_>>().join(",");
            Ok(Record::pass_if("weight_purity", &n.name, ok).sides(fmt(&coeffs), fmt(&h)))
        });
        vec![rec.unwrap_or_else(|e| Record::new("weight_purity", &n.name, Status::Fail).reason(e.to_string()))]
    })
}

/// `f ∘ g = id` and `g ∘ f = id` on canonical forms.
pub fn round_trip(expr: &VarietyExpr) -> cutpaste::Result<(bool, KClass, KClass)> {
    let rels = RelationSet::new();
    let table = CompactificationTable::new();
    let n = normalize(expr, &rels)?;
    let g = g_map(expr, &rels, &table)?;
    let fg = f_map(&g.expr, &rels)?;
    let gf = g_map(&f_map(&g.expr, &rels)?.to_expr(), &rels, &table)?.class;
    Ok((fg == n && g.class == n && gf == n, n, fg))
}

pub fn presentation_round_trip(c: &Corpus) -> Vec<Record> {
    let mut items: Vec<VarietyExpr> = vec![VarietyExpr::gen("A1")];
    items.extend(c.expressions.iter().cloned());
    par_records(&items, |e| {
        let subject = e.to_string();
        vec![match round_trip(e) {
            Ok((ok, n, fg)) => Record::pass_if("round_trip", &subject, ok).sides(fg, n),
            Err(err) => Record::new("round_trip", &subject, Status::Fail).reason(err.to_string()),
        }]
    })
}

/// Every family, in a fixed order.
pub fn run_corpus(c: &Corpus, o: &CheckOptions) -> Vec<Record> {
    let mut out = Vec::new();
    out.extend(additivity(c, o));
    out.extend(independence(c, o));
    out.extend(blowup_descent(c, o));
    out.extend(mayer_vietoris(c, o));
    out.extend(kunneth(c, o));
    out.extend(square_relation(c));
    out.extend(square_validity(c));
    out.extend(c_complete(c, o.depth));
    out.extend(cover_enumeration(c, o.depth));
    out.extend(dim_compatible(c));
    out.extend(point_count_oracle(c));
    out.extend(weight_purity(c));
    out.extend(presentation_round_trip(c));
    out
}

