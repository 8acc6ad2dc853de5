//! Reference μ-forms shared by the constraint and acceptance tests.
#![allow(dead_code)]

use torsion_help::chartab::{Character, CharacterTable};
use torsion_help::help_core::{mu_form, AugTuple, CaseAssignment};

pub fn m22() -> CharacterTable {
    CharacterTable::bundled_m22()
}

/// Character `j` (1-based) of the ordinary table (`p = 0`) or the `p`-modular table.
pub fn chi(t: &CharacterTable, p: u64, j: usize) -> Character {
    if p == 0 {
        t.ordinary[j - 1].clone()
    } else {
        t.brauer_table(p).unwrap().characters[j - 1].clone()
    }
}

pub fn tuple(t: &CharacterTable, order: u64, values: &[i64]) -> AugTuple {
    AugTuple::new(order, t.classes_of_order_dividing(order), values.to_vec())
}

/// Case in which each `u^d` has the given tuple.
pub fn case(t: &CharacterTable, k: u64, powers: &[(u64, Vec<i64>)]) -> CaseAssignment {
    powers
        .iter()
        .fold(CaseAssignment::new(k), |c, (d, v)| c.with(*d, tuple(t, k / d, v)))
}

pub fn names(t: &CharacterTable, k: u64) -> Vec<&str> {
    t.classes_of_order_dividing(k).iter().map(|&c| t.class_name(c)).collect()
}

/// One reference form: numerator of μ_l(u, χ_j, p) in the given case.
#[derive(Debug, Clone)]
pub struct Reference {
    pub k: u64,
    pub powers: Vec<(u64, Vec<i64>)>,
    pub l: u64,
    pub p: u64,
    pub j: usize,
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

impl Reference {
    /// `Err` names the form and what was generated instead.
    pub fn check(&self, t: &CharacterTable) -> Result<(), String> {
        let c = case(t, self.k, &self.powers);
        let f = mu_form(t, self.k, self.l, &chi(t, self.p, self.j), &c).map_err(|e| e.to_string())?.form;
        if f.coeffs == self.coeffs && f.constant == self.constant {
            Ok(())
        } else {
            Err(format!(
                "order {} l={} chi_{} p={} case {:?}: expected {:?} + {}, got {:?} + {}",
                self.k, self.l, self.j, self.p, self.powers, self.coeffs, self.constant, f.coeffs, f.constant
            ))
        }
    }
}

type Row<'a> = (u64, u64, usize, &'a [i64], i64);

fn push(out: &mut Vec<Reference>, k: u64, powers: &[(u64, &[i64])], rows: &[Row]) {
    let powers: Vec<(u64, Vec<i64>)> = powers.iter().map(|(d, v)| (*d, v.to_vec())).collect();
    for &(l, p, j, coeffs, constant) in rows {
        out.push(Reference { k, powers: powers.clone(), l, p, j, coeffs: coeffs.to_vec(), constant });
    }
}

const ELEVENS: [[i64; 2]; 10] = [[5, -4], [0, 1], [-2, 3], [2, -1], [-3, 4], [-4, 5], [1, 0], [3, -2], [-1, 2], [4, -3]];
const SEVENS: [[i64; 2]; 4] = [[0, 1], [2, -1], [1, 0], [-1, 2]];

/// Every reference form, grouped by order.
pub fn reference_forms() -> Vec<Reference> {
    let mut v = Vec::new();
    push(&mut v, 4, &[(2, &[1])], &[
        (0, 0, 2, &[10, 2, 2], 26),
        (2, 0, 2, &[-10, -2, -2], 26),
        (0, 0, 5, &[14, 6, -2], 62),
        (2, 0, 5, &[-14, -6, 2], 62),
        (0, 3, 5, &[2, -6, 2], 50),
        (2, 3, 5, &[-2, 6, -2], 50),
    ]);
    push(&mut v, 6, &[(2, &[1]), (3, &[1])], &[
        (1, 0, 2, &[5, 3, -1], 13),
        (3, 0, 2, &[-10, -6, 2], 22),
        (0, 7, 4, &[12, 0, 0], 60),
        (3, 7, 4, &[-12, 0, 0], 48),
        (1, 0, 3, &[-3, 0, 0], 48),
    ]);
    push(&mut v, 7, &[], &[
        (1, 0, 3, &[4, -3], 45),
        (3, 0, 3, &[-3, 4], 45),
        (1, 2, 2, &[4, -3], 10),
        (3, 2, 2, &[-3, 4], 10),
    ]);
    push(&mut v, 11, &[], &[
        (1, 0, 10, &[6, -5], 280),
        (2, 0, 10, &[-5, 6], 280),
        (1, 2, 5, &[7, -4], 70),
        (2, 2, 5, &[-4, 7], 70),
        (1, 3, 5, &[6, -5], 49),
        (2, 3, 5, &[-5, 6], 49),
    ]);
    push(&mut v, 10, &[(2, &[1]), (5, &[1])], &[
        (0, 0, 2, &[20, 4], 30),
        (5, 0, 2, &[-20, -4], 20),
        (1, 0, 3, &[-3, 0], 48),
    ]);
    for u2 in &SEVENS {
        push(&mut v, 14, &[(2, u2), (7, &[1])], &[(0, 0, 2, &[30, 0, 0], 26), (7, 0, 2, &[-30, 0, 0], 16)]);
    }
    push(&mut v, 15, &[(3, &[1]), (5, &[1])], &[(0, 0, 2, &[24, 8], 31), (5, 0, 2, &[-12, -4], 22)]);
    for u in &ELEVENS {
        push(&mut v, 22, &[(2, u), (11, &[1])], &[(0, 0, 2, &[50, -10, -10], 16), (11, 0, 2, &[-50, 10, 10], 6)]);
        push(&mut v, 33, &[(3, u), (11, &[1])], &[(0, 0, 2, &[60, -20, -20], 17), (11, 0, 2, &[-30, 10, 10], 8)]);
    }
    for u5 in &SEVENS {
        push(&mut v, 35, &[(5, u5), (7, &[1])], &[(0, 0, 2, &[24, 0, 0], 25), (0, 2, 7, &[-48, 0, 0], 90)]);
    }
    // (u^3, alpha, beta) constants of the order-21 cases.
    for (u3, alpha, beta) in [([1, 0], 49, 42), ([0, 1], 42, 49), ([2, -1], 56, 35), ([-1, 2], 35, 56)] {
        push(&mut v, 21, &[(3, &u3), (7, &[1])], &[
            (0, 0, 2, &[36, 0, 0], 27),
            (7, 0, 2, &[-18, 0, 0], 18),
            (1, 0, 3, &[0, 3, -4], alpha),
            (9, 0, 3, &[0, -6, 8], alpha),
            (3, 0, 3, &[0, 8, -6], beta),
        ]);
    }
    // (u^5, alpha) constants of the order-55 cases.
    let fifty_five: [([i64; 2], i64); 10] = [
        ([1, 0], 286),
        ([0, 1], 275),
        ([5, -4], 330),
        ([-2, 3], 253),
        ([2, -1], 297),
        ([-3, 4], 242),
        ([-4, 5], 231),
        ([3, -2], 308),
        ([-1, 2], 264),
        ([4, -3], 319),
    ];
    for (u5, alpha) in fifty_five {
        push(&mut v, 55, &[(5, &u5), (11, &[1])], &[
            (0, 0, 2, &[40, -40, -40], 15),
            (11, 0, 2, &[-10, 10, 10], 10),
            (1, 0, 2, &[1, -1, -1], 21),
            (1, 0, 10, &[0, -6, 5], alpha),
            (5, 0, 10, &[0, 24, -20], alpha),
        ]);
    }
    v
}
