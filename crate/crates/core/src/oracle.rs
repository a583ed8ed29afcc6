//! Brute-force oracle: every lattice point below `z`, raw form evaluation,
//! no root lists.

use crate::error::{Error, Result};
use crate::forms::EuclideanQuiver;
use crate::lattice::DimVector;
use crate::schofield::SchofieldPair;

pub const BOX_LIMIT: u128 = 100_000_000;

pub fn bruteforce_pairs(eq: &EuclideanQuiver, z: &DimVector) -> Result<Vec<SchofieldPair>> {
    eq.check_vector(z)?;
    let q = eq.quiver();
    let n = q.vertex_count();
    let euler = |x: &[i64], y: &[i64]| -> i64 {
        let mut s: i64 = (0..n).map(|i| x[i] * y[i]).sum();
        for a in q.arrows() {
            s -= x[a.tail] * y[a.head];
        }
        s
    };
    let delta = eq.delta().as_slice();
    let exceptional = |w: &[i64]| -> bool {
        if w.iter().any(|&c| c < 0) || w.iter().all(|&c| c == 0) || euler(w, w) != 1 {
            return false;
        }
        euler(delta, w) != 0 || w.iter().zip(delta).all(|(a, b)| a <= b)
    };
    if !exceptional(z.as_slice()) {
        return Err(Error::NotExceptional(z.to_string()));
    }
    let points: u128 = z.iter().map(|&c| c as u128 + 1).product();
    if points > BOX_LIMIT {
        return Err(Error::BoxTooLarge(points));
    }
    let mut out = Vec::new();
    if z.support() <= 1 {
        return Ok(out);
    }
    let zs = z.as_slice();
    let mut x = vec![0i64; n];
    let mut y = vec![0i64; n];
    loop {
        // advance the odometer; the all-zero start is skipped
        let mut k = 0;
        while k < n && x[k] == zs[k] {
            x[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        x[k] += 1;
        if x == zs {
            continue;
        }
        for i in 0..n {
            y[i] = zs[i] - x[i];
        }
        if exceptional(&x) && exceptional(&y) && euler(&x, &y) == 0 {
            if euler(&y, &x) != -1 {
                return Err(Error::Verification(format!("oracle: ⟨y,x⟩ ≠ −1 for x = {x:?}")));
            }
            let (xd, yd) = (DimVector::new(x.clone()), DimVector::new(y.clone()));
            out.push(SchofieldPair { x: eq.member(xd)?, y: eq.member(yd)?, u: 1, v: 1, special: false });
        }
    }
    let d = euler(delta, zs);
    if d.abs() == 1 {
        let mut u = 1i64;
        loop {
            let r: Vec<i64> = (0..n).map(|i| zs[i] - u * delta[i]).collect();
            if r.iter().any(|&c| c < 0) {
                break;
            }
            let below = r.iter().zip(delta).all(|(a, b)| a <= b) && r.as_slice() != delta;
            if below && r.iter().any(|&c| c != 0) && euler(&r, &r) == 1 {
                let other: Vec<i64> = (0..n).map(|i| delta[i] - r[i]).collect();
                let k = u as u32;
                let (rd, od) = (DimVector::new(r), DimVector::new(other));
                out.push(if d < 0 {
                    SchofieldPair { x: eq.member(rd)?, y: eq.member(od)?, u: k + 1, v: k, special: true }
                } else {
                    SchofieldPair { x: eq.member(od)?, y: eq.member(rd)?, u: k, v: k + 1, special: true }
                });
                break;
            }
            u += 1;
        }
    }
    out.sort_by(|a, b| a.special.cmp(&b.special).then_with(|| a.x.dim.cmp(&b.x.dim)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        let eq = EuclideanQuiver::parse("A~1,2").unwrap();
        let z = DimVector::from([2, 2, 1]);
        assert_eq!(bruteforce_pairs(&eq, &z).unwrap(), eq.all_pairs(&z).unwrap());
        assert!(bruteforce_pairs(&eq, &DimVector::from([0, 1, 0])).unwrap().is_empty());
        assert!(matches!(bruteforce_pairs(&eq, &DimVector::from([1, 1, 1])), Err(Error::NotExceptional(_))));
    }

    #[test]
    fn oracle_rejects_huge_boxes() {
        let eq = EuclideanQuiver::parse("E~8").unwrap();
        let z = eq.dim_of(&"P(40,1)".parse().unwrap()).unwrap();
        assert!(matches!(bruteforce_pairs(&eq, &z), Err(Error::BoxTooLarge(_))));
    }
}
