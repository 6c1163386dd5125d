//! Seeded generation of the toric check corpus.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cutpaste::kring::VarietyExpr;
use cutpaste::site::{localization_square, DistinguishedSquare, SpanMorphism, SquareKind};
use cutpaste::toric::{star_subdivide, Fan, ToricObject};

/// Bumped whenever the generation recipe changes.
pub const RECIPE: &str = "corpus-v1";

#[derive(Clone, Debug)]
pub struct Named<T> {
    pub name: String,
    pub item: T,
}

fn named<T>(name: impl Into<String>, item: T) -> Named<T> {
    Named { name: name.into(), item }
}

/// A distinguished square with the morphisms into its base to test
/// c-completeness against.
#[derive(Clone, Debug)]
pub struct SquareCase {
    pub square: DistinguishedSquare,
    pub morphisms: Vec<Named<SpanMorphism>>,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub seed: u64,
    pub size: usize,
    /// Whole fans: complete smooth surfaces, then a few fixed and product fans.
    pub fans: Vec<Named<Arc<Fan>>>,
    /// `(X, U)` with `U` open in `X`.
    pub pairs: Vec<Named<(ToricObject, ToricObject)>>,
    /// Non-compact objects in fans of their own, to be completed.
    pub opens: Vec<Named<ToricObject>>,
    pub squares: Vec<Named<SquareCase>>,
    /// Square names that come from star subdivisions.
    pub subdivisions: Vec<String>,
    /// `(X, U, V)` with `X = U ∪ V`.
    pub triples: Vec<Named<(ToricObject, ToricObject, ToricObject)>>,
    pub products: Vec<Named<(ToricObject, ToricObject)>>,
    pub expressions: Vec<VarietyExpr>,
}

fn builtin(name: &str) -> Arc<Fan> {
    Arc::new(Fan::builtin(name).expect("builtin fan"))
}

fn cones_of_dim(f: &Fan, d: usize) -> Vec<usize> {
    (0..f.num_cones()).filter(|&c| f.cone(c).dim() == d).collect()
}

fn obj(f: &Arc<Fan>, ids: impl IntoIterator<Item = usize>) -> ToricObject {
    ToricObject::new(f.clone(), ids.into_iter().collect()).expect("locally closed by construction")
}

fn faces(f: &Fan, maximal: &[usize]) -> BTreeSet<usize> {
    maximal.iter().flat_map(|&m| f.faces_of(m)).collect()
}

/// A random open subobject: the faces of a nonempty random set of
/// maximal cones.
fn random_open(f: &Arc<Fan>, rng: &mut ChaCha8Rng) -> ToricObject {
    let maximal = f.maximal_ids().to_vec();
    let k = rng.gen_range(1..=maximal.len());
    let chosen: Vec<usize> = maximal.choose_multiple(rng, k).copied().collect();
    obj(f, faces(f, &chosen))
}

/// A proper open subobject, or `None` if the fan has one maximal cone.
fn random_proper_open(f: &Arc<Fan>, rng: &mut ChaCha8Rng) -> Option<ToricObject> {
    let maximal = f.maximal_ids().to_vec();
    if maximal.len() < 2 {
        return None;
    }
    let k = rng.gen_range(1..maximal.len());
    let chosen: Vec<usize> = maximal.choose_multiple(rng, k).copied().collect();
    Some(obj(f, faces(f, &chosen)))
}

fn star(f: &Arc<Fan>, c: usize) -> ToricObject {
    obj(f, f.star(c))
}

/// Blows up a random 2-cone of a smooth complete surface at the sum of its
/// rays.
fn blow_up(f: &Arc<Fan>, rng: &mut ChaCha8Rng) -> Arc<Fan> {
    let two = cones_of_dim(f, 2);
    let c = *two.choose(rng).expect("complete surface has 2-cones");
    let v = sum_of_rays(f, c, &[1, 1]);
    star_subdivide(f, &v).expect("interior ray").fan
}

fn sum_of_rays(f: &Fan, c: usize, weights: &[i64]) -> Vec<i64> {
    let rays = f.cone_vectors(f.cone(c));
    (0..f.rank())
        .map(|k| rays.iter().zip(weights).map(|(r, w)| w * r[k]).sum())
        .collect()
}

fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> VarietyExpr {
    const LEAVES: [&str; 10] = ["pt", "empty", "A1", "A2", "A3", "P1", "P2", "P3", "Gm", "L"];
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..6) {
            0 => VarietyExpr::int(rng.gen_range(0..4)),
            _ => match *LEAVES.choose(rng).expect("nonempty") {
                "L" => VarietyExpr::Lefschetz,
                name => VarietyExpr::gen(name),
            },
        };
    }
    let (a, b) = (random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    match rng.gen_range(0..3) {
        0 => VarietyExpr::sum(a, b),
        1 => VarietyExpr::diff(a, b),
        _ => VarietyExpr::prod(a, b),
    }
}

impl Corpus {
    /// The corpus for `seed`: `size` random smooth complete surfaces
    /// (iterated blowups of P2 or P1xP1) and everything derived from them.
    pub fn generate(seed: u64, size: usize) -> Corpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Corpus {
            seed,
            size,
            fans: Vec::new(),
            pairs: Vec::new(),
            opens: Vec::new(),
            squares: Vec::new(),
            subdivisions: Vec::new(),
            triples: Vec::new(),
            products: Vec::new(),
            expressions: Vec::new(),
        };
        let mut surfaces = Vec::new();
        for i in 0..size {
            let mut f = builtin(if rng.gen_bool(0.5) { "P2" } else { "P1xP1" });
            for _ in 0..rng.gen_range(0..=3) {
                f = blow_up(&f, &mut rng);
            }
            surfaces.push(f.clone());
            c.fans.push(named(format!("S{i}"), f));
        }
        for name in ["P1", "P3"] {
            c.fans.push(named(name, builtin(name)));
        }
        c.fans.push(named("P2xP1", Arc::new(Fan::builtin("P2").unwrap().product(&Fan::builtin("P1").unwrap()))));
        c.fans.push(named("P1xP1xP1", Arc::new(Fan::builtin("P1xP1").unwrap().product(&Fan::builtin("P1").unwrap()))));
        for (i, s) in surfaces.iter().enumerate().take(size.div_ceil(5)) {
            c.fans.push(named(format!("S{i}xP1"), Arc::new(s.product(&Fan::builtin("P1").unwrap()))));
        }

        c.add_fixed_cases();
        for (i, f) in surfaces.iter().enumerate() {
            c.add_surface_cases(i, f, &mut rng);
        }
        let rank3: Vec<Named<Arc<Fan>>> = c.fans.iter().filter(|f| f.item.rank() == 3).cloned().collect();
        for f in &rank3 {
            let x = ToricObject::whole(f.item.clone());
            let u = random_open(&f.item, &mut rng);
            c.pairs.push(named(format!("{}/open", f.name), (x, u)));
        }
        c.add_products(&mut rng);
        for _ in 0..size.max(1) * 3 {
            let depth = rng.gen_range(1..=4);
            c.expressions.push(random_expr(&mut rng, depth));
        }
        c
    }

    fn add_fixed_cases(&mut self) {
        let p1 = builtin("P1");
        let p2 = builtin("P2");
        let pos = p1.find_cone(&[vec![1]]).unwrap();
        let neg = p1.find_cone(&[vec![-1]]).unwrap();
        let x = ToricObject::whole(p1.clone());
        let a = obj(&p1, [0, pos]);
        let b = obj(&p1, [0, neg]);
        self.pairs.push(named("P1/A1", (x.clone(), a.clone())));
        self.triples.push(named("P1=A1+A1", (x, a, b)));
        for name in ["A1", "A2", "Gm"] {
            self.opens.push(named(name, ToricObject::whole(builtin(name))));
        }
        let s = star_subdivide(&p2, &[1, 1]).unwrap();
        self.subdivisions.push("P2/blowup(1,1)".into());
        let morphisms = self.morphisms_into(&s.square);
        self.squares.push(named("P2/blowup(1,1)", SquareCase { square: s.square, morphisms }));
    }

    fn morphisms_into(&self, sq: &DistinguishedSquare) -> Vec<Named<SpanMorphism>> {
        let x = sq.x.as_toric().expect("toric square");
        let mut out = vec![named("id", SpanMorphism::identity(&sq.x))];
        let f = x.fan();
        // An orbit closure, its open complement and a fixed point.
        let cones: Vec<usize> = x.cone_ids().iter().copied().collect();
        if let Some(&ray) = cones.iter().find(|&&c| f.cone(c).dim() == 1) {
            let v = star(f, ray).intersect(x).expect("same fan");
            if let Ok(m) = SpanMorphism::inclusion(&v, x) {
                out.push(named("closed-curve", m));
            }
            if let Ok(u) = x.minus(&v) {
                if !u.is_empty() && u.is_open_in(x) {
                    if let Ok(m) = SpanMorphism::inclusion(&u, x) {
                        out.push(named("open-complement", m));
                    }
                }
            }
        }
        if let Some(&pt) = cones.iter().rev().find(|&&c| f.cone(c).dim() == f.rank()) {
            if let Ok(m) = SpanMorphism::inclusion(&obj(f, [pt]), x) {
                out.push(named("point", m));
            }
        }
        if sq.kind.is_blowup() {
            out.push(named("p", sq.p.clone()));
        }
        out
    }

    fn add_surface_cases(&mut self, i: usize, f: &Arc<Fan>, rng: &mut ChaCha8Rng) {
        let x = ToricObject::whole(f.clone());
        let rays = cones_of_dim(f, 1);
        let two = cones_of_dim(f, 2);

        // Additivity pairs.
        self.pairs.push(named(format!("S{i}/open"), (x.clone(), random_open(f, rng))));
        let k = rng.gen_range(1..=2);
        let removed: Vec<usize> = rays.choose_multiple(rng, k).copied().collect();
        let u = obj(f, (0..f.num_cones()).filter(|&c| removed.iter().all(|r| !f.faces_of(c).contains(r))));
        self.pairs.push(named(format!("S{i}/minus-divisors"), (x.clone(), u)));
        let ray = *rays.choose(rng).unwrap();
        let curve = star(f, ray);
        let through: Vec<usize> = curve.cone_ids().iter().copied().filter(|&c| f.cone(c).dim() == 2).collect();
        let pt = *through.choose(rng).unwrap();
        let punctured = obj(f, curve.cone_ids().iter().copied().filter(|&c| c != pt));
        self.pairs.push(named(format!("S{i}/curve-minus-point"), (curve.clone(), punctured)));
        let w = random_open(f, rng);
        let w_sub = {
            let maximal: Vec<usize> = w.cone_ids().iter().copied().filter(|&c| f.cone(c).dim() == 2).collect();
            let k = rng.gen_range(0..=maximal.len());
            let chosen: Vec<usize> = maximal.choose_multiple(rng, k).copied().collect();
            let mut ids = faces(f, &chosen);
            ids.insert(0);
            obj(f, ids)
        };
        self.pairs.push(named(format!("S{i}/open-in-open"), (w, w_sub)));

        // An open in a fan of its own, for independence of the completion.
        if let Some(u) = random_proper_open(f, rng) {
            let own = Arc::new(f.subfan(u.cone_ids()));
            self.opens.push(named(format!("S{i}/own-open"), ToricObject::whole(own)));
        }

        // Squares: a smooth blowup, an abstract one, a localization, a
        // localization with non-dense open, and a blowup over a curve.
        let c2 = *two.choose(rng).unwrap();
        let smooth = star_subdivide(f, &sum_of_rays(f, c2, &[1, 1])).expect("interior ray");
        let weights = if rng.gen_bool(0.5) { [1, 2] } else { [2, 1] };
        let abstract_ = star_subdivide(f, &sum_of_rays(f, c2, &weights)).expect("interior ray");
        let loc = localization_square(&x, &random_open(f, rng)).expect("open by construction");
        let (r1, r2) = {
            let two_rays: Vec<usize> = f.faces_of(c2).into_iter().filter(|&c| f.cone(c).dim() == 1).collect();
            (two_rays[0], two_rays[1])
        };
        let lines = obj(f, f.star(r1).into_iter().chain(f.star(r2)));
        let line_minus = obj(f, f.star(r1).into_iter().filter(|&c| c != c2));
        let loc_nondense = localization_square(&lines, &line_minus).expect("open in the two lines");
        let over_curve = {
            let s = &smooth.square;
            let (y, p) = (s.y.as_toric().unwrap(), s.p.as_toric().unwrap());
            let line = star(f, r1);
            let over = obj(y.fan(), y.cone_ids().iter().copied().filter(|&h| p.image_of(h).is_some_and(|t| line.contains(t))));
            DistinguishedSquare::toric_blowup(
                SquareKind::AbstractBlowup,
                s.e.as_toric().unwrap().clone(),
                over,
                s.c.as_toric().unwrap().clone(),
                line,
            )
            .expect("restriction of a blowup square")
        };
        for (tag, sq, subdivision) in [
            ("smooth-blowup", smooth.square, true),
            ("abstract-blowup", abstract_.square, true),
            ("localization", loc, false),
            ("localization-nondense", loc_nondense, false),
            ("blowup-over-curve", over_curve, false),
        ] {
            let name = format!("S{i}/{tag}");
            if subdivision {
                self.subdivisions.push(name.clone());
            }
            let morphisms = self.morphisms_into(&sq);
            self.squares.push(named(name, SquareCase { square: sq, morphisms }));
        }

        // Mayer–Vietoris: every maximal cone goes to U, V or both.
        let mut a = Vec::new();
        let mut b = Vec::new();
        for &m in f.maximal_ids() {
            match rng.gen_range(0..3) {
                0 => a.push(m),
                1 => b.push(m),
                _ => {
                    a.push(m);
                    b.push(m);
                }
            }
        }
        let mut ua = faces(f, &a);
        let mut vb = faces(f, &b);
        ua.insert(0);
        vb.insert(0);
        self.triples.push(named(format!("S{i}/cover"), (x, obj(f, ua), obj(f, vb))));
    }

    fn add_products(&mut self, rng: &mut ChaCha8Rng) {
        let mut pool: Vec<Named<ToricObject>> = Vec::new();
        for p in &self.pairs {
            if p.item.0.rank() <= 2 {
                pool.push(named(format!("{}:U", p.name), p.item.1.clone()));
                pool.push(named(format!("{}:X", p.name), p.item.0.clone()));
            }
        }
        pool.extend(self.opens.iter().filter(|o| o.item.rank() <= 2).cloned());
        for name in ["pt", "P1", "Gm", "A1"] {
            pool.push(named(name, ToricObject::whole(builtin(name))));
        }
        let n = (2 * self.size).max(100);
        for _ in 0..n {
            let a = pool.choose(rng).unwrap();
            let b = pool.choose(rng).unwrap();
            self.products.push(named(format!("{} x {}", a.name, b.name), (a.item.clone(), b.item.clone())));
        }
    }

    pub fn counts(&self) -> [(&'static str, usize); 8] {
        [
            ("fans", self.fans.len()),
            ("pairs", self.pairs.len()),
            ("opens", self.opens.len()),
            ("squares", self.squares.len()),
            ("subdivisions", self.subdivisions.len()),
            ("triples", self.triples.len()),
            ("products", self.products.len()),
            ("expressions", self.expressions.len()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let a = Corpus::generate(7, 12);
        let b = Corpus::generate(7, 12);
        let keys = |c: &Corpus| c.fans.iter().map(|f| f.item.key()).collect::<Vec<_>>();
        assert_eq!(keys(&a), keys(&b));
        assert_eq!(a.expressions, b.expressions);
        assert!(a.fans.iter().all(|f| f.item.is_complete()));
        assert!(a.fans.iter().filter(|f| f.item.rank() == 2).all(|f| f.item.is_smooth()));
        for p in &a.pairs {
            assert!(p.item.1.is_open_in(&p.item.0), "{}", p.name);
        }
        for t in &a.triples {
            let (x, u, v) = &t.item;
            assert_eq!(&u.union(v).unwrap(), x, "{}", t.name);
        }
        assert!(a.opens.iter().all(|o| !o.item.is_compact()));
        assert_ne!(keys(&a), keys(&Corpus::generate(8, 12)));
    }
}
