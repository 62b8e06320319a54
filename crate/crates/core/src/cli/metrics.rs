use std::fmt::Write;

/// Confusion matrix with rows = true class, columns = predicted class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub confusion: Vec<Vec<usize>>,
}

impl Evaluation {
    pub fn new(classes: usize, truth: &[usize], predicted: &[usize]) -> Self {
        let mut confusion = vec![vec![0; classes]; classes];
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[t][p] += 1;
        }
        Self { confusion }
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let correct: usize = (0..self.confusion.len()).map(|c| self.confusion[c][c]).sum();
        correct as f64 / self.total().max(1) as f64
    }

    /// `None` for classes absent from the evaluated set.
    pub fn per_class(&self) -> Vec<Option<f64>> {
        self.confusion
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let n: usize = row.iter().sum();
                (n > 0).then(|| row[c] as f64 / n as f64)
            })
            .collect()
    }

    pub fn render(&self, names: &[String]) -> String {
        let name = |c: usize| names.get(c).cloned().unwrap_or_else(|| c.to_string());
        let mut s = String::new();
        let correct: usize = (0..self.confusion.len()).map(|c| self.confusion[c][c]).sum();
        let _ = writeln!(s, "accuracy: {} ({correct}/{})", self.accuracy(), self.total());
        for (c, acc) in self.per_class().iter().enumerate() {
            match acc {
                Some(a) => {
                    let _ = writeln!(s, "class {}: {a}", name(c));
                }
                None => {
                    let _ = writeln!(s, "class {}: n/a", name(c));
                }
            }
        }
        let _ = writeln!(s, "confusion (rows = true, columns = predicted):");
        for (c, row) in self.confusion.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "{}\t{}", name(c), cells.join("\t"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_matches_confusion() {
        let e = Evaluation::new(3, &[0, 0, 1, 2, 2, 2], &[0, 1, 1, 2, 0, 2]);
        assert_eq!(e.confusion[0], vec![1, 1, 0]);
        assert_eq!(e.accuracy(), 4.0 / 6.0);
        assert_eq!(e.per_class(), vec![Some(0.5), Some(1.0), Some(2.0 / 3.0)]);
        assert!(e.render(&[]).starts_with(&format!("accuracy: {} (4/6)", 4.0 / 6.0)));
    }
}
