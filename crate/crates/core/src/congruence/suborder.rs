//! `Cl_{Z+fO} ≅ I_O(fO)/P_{O,Z}(fO)` via extension of ideals.

use super::group::{gen_class_group, GenClassGroup};
use super::lambda::LambdaSet;
use super::residue::Modulus;
use crate::error::{Error, Result};
use crate::quadforms::{class_group_coprime, IdealClass, QuadOrder};

#[derive(Clone, Debug)]
pub struct SuborderTransport {
    pub sub: QuadOrder,
    pub f: i64,
    pub sub_classes: Vec<IdealClass>,
    /// `image[i]` is the class of `a_i·O` in `group`.
    pub image: Vec<usize>,
    pub group: GenClassGroup,
}

pub fn suborder_transport(o: &QuadOrder, f: i64) -> Result<SuborderTransport> {
    if f < 2 || !o.coprime_to_cond(f) {
        return Err(Error::Domain(format!("f = {f} must be at least 2 and coprime to the conductor {}", o.cond)));
    }
    let sub = o.suborder(f)?;
    let sub_classes = class_group_coprime(&sub, f);
    let group = gen_class_group(o, &Modulus::scalar(o, f)?, LambdaSet::Integers)?;
    let image =
        sub_classes.iter().map(|c| group.class_index(&c.rep.extend_to(&sub, o)?)).collect::<Result<Vec<_>>>()?;

    let mut seen = image.clone();
    seen.sort();
    seen.dedup();
    if seen.len() != image.len() || image.len() != group.len() {
        return Err(Error::Consistency(format!(
            "extension map is not bijective: {} classes of the suborder, {} images, target size {}",
            sub_classes.len(),
            seen.len(),
            group.len()
        )));
    }
    for (i, a) in sub_classes.iter().enumerate() {
        for (j, b) in sub_classes.iter().enumerate() {
            let ab = a.rep.mul(&sub, &b.rep)?.extend_to(&sub, o)?;
            if group.class_index(&ab)? != group.mul(image[i], image[j]) {
                return Err(Error::Consistency(format!("extension map is not multiplicative on classes {i}, {j}")));
            }
        }
    }
    Ok(SuborderTransport { sub, f, sub_classes, image, group })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::{class_number, order_from_disc};

    #[test]
    fn examples() {
        for (d, f, h) in [(-4i64, 3i64, 2usize), (-11, 2, 3), (-3, 3, 1), (-4, 5, 2), (-23, 3, 6)] {
            let o = order_from_disc(d).unwrap();
            let t = suborder_transport(&o, f).unwrap();
            assert_eq!(t.group.len(), h, "D = {d}, f = {f}");
            assert_eq!(class_number(&t.sub), h);
        }
    }

    #[test]
    fn rejects_conductor() {
        let o = order_from_disc(-36).unwrap();
        assert!(suborder_transport(&o, 3).is_err());
    }
}
