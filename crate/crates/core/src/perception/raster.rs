use crate::geom::Vec2;

/// Conservative line rasterization in continuous grid coordinates: visits
/// every unit cell the segment `a -> b` passes through, including both
/// neighbours when it crosses exactly through a cell corner. Cells may lie
/// outside any particular grid; callers clip.
pub fn supercover(a: Vec2, b: Vec2, mut visit: impl FnMut(i64, i64)) {
    let (mut cx, mut cy) = (a.x.floor() as i64, a.y.floor() as i64);
    let d = b - a;
    let sx: i64 = if d.x > 0.0 { 1 } else { -1 };
    let sy: i64 = if d.y > 0.0 { 1 } else { -1 };
    let tdx = if d.x != 0.0 { 1.0 / d.x.abs() } else { f64::INFINITY };
    let tdy = if d.y != 0.0 { 1.0 / d.y.abs() } else { f64::INFINITY };
    let mut tmx = if d.x > 0.0 {
        (cx as f64 + 1.0 - a.x) * tdx
    } else if d.x < 0.0 {
        (a.x - cx as f64) * tdx
    } else {
        f64::INFINITY
    };
    let mut tmy = if d.y > 0.0 {
        (cy as f64 + 1.0 - a.y) * tdy
    } else if d.y < 0.0 {
        (a.y - cy as f64) * tdy
    } else {
        f64::INFINITY
    };
    visit(cx, cy);
    loop {
        if tmx.min(tmy) > 1.0 {
            break;
        }
        if (tmx - tmy).abs() < 1e-12 {
            visit(cx + sx, cy);
            visit(cx, cy + sy);
            cx += sx;
            cy += sy;
            tmx += tdx;
            tmy += tdy;
        } else if tmx < tmy {
            cx += sx;
            tmx += tdx;
        } else {
            cy += sy;
            tmy += tdy;
        }
        visit(cx, cy);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Closed unit square [c, c+1] x [r, r+1] against a segment (Liang-Barsky clip).
    fn touches(a: Vec2, b: Vec2, c: i64, r: i64) -> bool {
        let d = b - a;
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        let checks = [
            (-d.x, a.x - c as f64),
            (d.x, c as f64 + 1.0 - a.x),
            (-d.y, a.y - r as f64),
            (d.y, r as f64 + 1.0 - a.y),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    t0 = t0.max(t);
                } else {
                    t1 = t1.min(t);
                }
            }
        }
        t0 <= t1
    }

    #[test]
    fn matches_brute_force_on_random_segments() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let a = Vec2::new(rng.random_range(0.0..20.0), rng.random_range(0.0..20.0));
            let b = a + Vec2::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let mut got = BTreeSet::new();
            supercover(a, b, |c, r| {
                got.insert((c, r));
            });
            let mut want = BTreeSet::new();
            for c in -5..26 {
                for r in -5..26 {
                    if touches(a, b, c, r) {
                        want.insert((c, r));
                    }
                }
            }
            assert_eq!(got, want, "segment {a:?} -> {b:?}");
        }
    }

    #[test]
    fn diagonal_through_corner_marks_both_neighbours() {
        let mut got = BTreeSet::new();
        supercover(Vec2::new(0.5, 0.5), Vec2::new(1.5, 1.5), |c, r| {
            got.insert((c, r));
        });
        assert!(got.contains(&(1, 0)) && got.contains(&(0, 1)) && got.contains(&(1, 1)));
    }
}
