//! The four 0/1 incidence matrices of an instance: resources × view
//! periods (R), activities × view periods (A), missions × activities (M)
//! and view periods × slots (V).

use serde::Serialize;

use crate::instance::ProblemInstance;

/// Row-major sparse 0/1 matrix; each row stores its sorted nonzero columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparseBinaryMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    rows: Vec<Vec<u32>>,
}

impl SparseBinaryMatrix {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        SparseBinaryMatrix {
            n_rows,
            n_cols,
            rows: vec![Vec::new(); n_rows],
        }
    }

    pub fn set(&mut self, i: usize, j: usize) {
        assert!(i < self.n_rows && j < self.n_cols, "({i}, {j}) out of bounds");
        let row = &mut self.rows[i];
        if let Err(pos) = row.binary_search(&(j as u32)) {
            row.insert(pos, j as u32);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.n_cols];
        for row in &self.rows {
            for &j in row {
                sums[j as usize] += 1;
            }
        }
        sums
    }

    /// Rows with a 1 in column `j`.
    pub fn column(&self, j: usize) -> Vec<usize> {
        (0..self.n_rows).filter(|&i| self.get(i, j)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixBundle {
    /// |R| × |V|
    pub r: SparseBinaryMatrix,
    /// |A| × |V|
    pub a: SparseBinaryMatrix,
    /// |M| × |A|
    pub m: SparseBinaryMatrix,
    /// |V| × |T|
    pub v: SparseBinaryMatrix,
}

pub fn assemble_matrices(instance: &ProblemInstance) -> MatrixBundle {
    let n_res = instance.resources.len();
    let n_vp = instance.view_periods.len();
    let n_act = instance.activities.len();
    let n_mis = instance.missions.len();
    let horizon = instance.horizon() as usize;

    let mut r = SparseBinaryMatrix::new(n_res, n_vp);
    let mut a = SparseBinaryMatrix::new(n_act, n_vp);
    let mut m = SparseBinaryMatrix::new(n_mis, n_act);
    let mut v = SparseBinaryMatrix::new(n_vp, horizon);

    for vp in 0..n_vp {
        for &res in instance.resources_of(vp) {
            r.set(res, vp);
        }
        a.set(instance.activity_of_vp(vp), vp);
        v.rows[vp] = instance
            .availability_mask(vp)
            .iter()
            .enumerate()
            .filter_map(|(t, &on)| on.then_some(t as u32))
            .collect();
    }
    for act in 0..n_act {
        m.set(instance.mission_of(act), act);
    }
    MatrixBundle { r, a, m, v }
}
