//! A transform from Q, its fixed-point policy, and the conversion of a shifted matrix back into Q.

use commeq::transforms::{
    assemble_transform, deviation_to_transform, fixed_point, linear_to_transform,
    vertex_disagreement, DeviationPair,
};
use commeq::TypeWisePolicy;

fn main() -> commeq::Result<()> {
    let w = vec![vec![0.7, 0.3], vec![0.2, 0.8]];
    let y = vec![
        vec![0.9, 0.1],
        vec![0.5, 0.5],
        vec![0.1, 0.9],
        vec![0.6, 0.4],
        vec![0.3, 0.7],
        vec![1.0, 0.0],
        vec![0.4, 0.6],
        vec![0.2, 0.8],
    ];
    let q = assemble_transform(&w, &y)?;
    let x = fixed_point(&q, 1e-12, &TypeWisePolicy::uniform(2, 2))?;
    println!("fixed point {:?}", x.as_slice());

    let d = DeviationPair {
        psi: vec![1, 0],
        phi: vec![vec![1, 1], vec![0, 1]],
    };
    let mut m = deviation_to_transform(&d, 2).dense();
    // Shift row 0: +0.25 on type block 0 and −0.25 on type block 1.
    for c in 0..4 {
        m[c] += if c < 2 { 0.25 } else { -0.25 };
    }
    let back = linear_to_transform(&m, 2, 2)?;
    println!(
        "recovered mixer row 0: [{}, {}], vertex disagreement {:.1e}",
        back.w(0, 0),
        back.w(0, 1),
        vertex_disagreement(&back, &m)
    );
    Ok(())
}
