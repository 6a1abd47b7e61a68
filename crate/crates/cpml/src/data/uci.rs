//! Rule-generated versions of three classic categorical benchmarks.
//!
//! Each dataset here is defined by an exact generating rule, so the full
//! instance set can be reconstructed in code instead of shipping data files:
//! the balance-scale torque rule, the set of terminal tic-tac-toe boards, and
//! the "exactly two attributes at their first value" concept over a small
//! attribute grid. Rows are enumerated in a fixed order, so repeated calls
//! build identical datasets.

use crate::data::CategoricalDataset;
use crate::Result;

/// Balance-scale dataset: 625 weight/distance combinations.
///
/// Features are left weight, left distance, right weight, right distance,
/// each in 1..=5; the class compares the two torques (`L`, `B`, `R`).
pub fn balance_scale() -> Result<CategoricalDataset> {
    let mut cells = Vec::with_capacity(625 * 4);
    let mut labels = Vec::with_capacity(625);
    // Class indices follow first occurrence in enumeration order: the
    // all-ones board balances, and a right-heavy board appears before a
    // left-heavy one.
    let class_names = vec!["B".to_string(), "R".to_string(), "L".to_string()];
    for lw in 1u32..=5 {
        for ld in 1u32..=5 {
            for rw in 1u32..=5 {
                for rd in 1u32..=5 {
                    cells.extend_from_slice(&[lw - 1, ld - 1, rw - 1, rd - 1]);
                    let (left, right) = (lw * ld, rw * rd);
                    labels.push(match left.cmp(&right) {
                        std::cmp::Ordering::Equal => 0,
                        std::cmp::Ordering::Less => 1,
                        std::cmp::Ordering::Greater => 2,
                    });
                }
            }
        }
    }
    let value_names = (0..4).map(|_| (1..=5).map(|v| v.to_string()).collect()).collect();
    CategoricalDataset::new(cells, labels, vec![5; 4], 3, Some(value_names), Some(class_names))
}

/// Tic-tac-toe endgame dataset: all 958 distinct terminal boards.
///
/// Boards are generated by playing out every game (x moves first, play stops
/// at a win or a full board) and deduplicating. The nine features are the
/// cells in row-major order with values `x`/`o`/`b`, and the class is
/// `positive` when x holds a winning line.
pub fn tic_tac_toe() -> Result<CategoricalDataset> {
    const EMPTY: u8 = 0;
    const X: u8 = 1;
    const O: u8 = 2;
    const LINES: [[usize; 3]; 8] = [
        [0, 1, 2],
        [3, 4, 5],
        [6, 7, 8],
        [0, 3, 6],
        [1, 4, 7],
        [2, 5, 8],
        [0, 4, 8],
        [2, 4, 6],
    ];

    fn wins(board: &[u8; 9], player: u8) -> bool {
        LINES.iter().any(|line| line.iter().all(|&i| board[i] == player))
    }

    fn explore(board: &mut [u8; 9], player: u8, terminal: &mut std::collections::HashSet<[u8; 9]>) {
        if wins(board, X) || wins(board, O) || board.iter().all(|&c| c != EMPTY) {
            terminal.insert(*board);
            return;
        }
        for i in 0..9 {
            if board[i] == EMPTY {
                board[i] = player;
                explore(board, if player == X { O } else { X }, terminal);
                board[i] = EMPTY;
            }
        }
    }

    let mut terminal = std::collections::HashSet::new();
    explore(&mut [EMPTY; 9], X, &mut terminal);
    let mut boards: Vec<[u8; 9]> = terminal.into_iter().collect();
    boards.sort_unstable();

    let mut cells = Vec::with_capacity(boards.len() * 9);
    let mut labels = Vec::with_capacity(boards.len());
    for board in &boards {
        for &c in board.iter() {
            // Feature encoding: x=0, o=1, blank=2.
            cells.push(match c {
                X => 0,
                O => 1,
                _ => 2,
            });
        }
        labels.push(if wins(board, X) { 0 } else { 1 });
    }
    let value_names = (0..9)
        .map(|_| vec!["x".to_string(), "o".to_string(), "b".to_string()])
        .collect();
    let class_names = vec!["positive".to_string(), "negative".to_string()];
    CategoricalDataset::new(cells, labels, vec![3; 9], 2, Some(value_names), Some(class_names))
}

/// Six-attribute rule dataset: label 1 iff exactly two attributes equal
/// their first value. Enumerates the complete 432-row attribute grid with
/// cardinalities (3, 3, 2, 3, 4, 2).
pub fn monks2() -> Result<CategoricalDataset> {
    const CARDS: [usize; 6] = [3, 3, 2, 3, 4, 2];
    let total: usize = CARDS.iter().product();
    let mut cells = Vec::with_capacity(total * 6);
    let mut labels = Vec::with_capacity(total);
    for row in 0..total {
        let mut rest = row;
        let mut firsts = 0;
        // Mixed-radix decoding, last attribute fastest.
        let mut values = [0usize; 6];
        for d in (0..6).rev() {
            values[d] = rest % CARDS[d];
            rest /= CARDS[d];
        }
        for d in 0..6 {
            cells.push(values[d] as u32);
            if values[d] == 0 {
                firsts += 1;
            }
        }
        labels.push(if firsts == 2 { 1 } else { 0 });
    }
    let value_names = CARDS
        .iter()
        .map(|&s| (1..=s).map(|v| v.to_string()).collect())
        .collect();
    let class_names = vec!["0".to_string(), "1".to_string()];
    CategoricalDataset::new(cells, labels, CARDS.to_vec(), 2, Some(value_names), Some(class_names))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balance_counts() {
        let ds = balance_scale().unwrap();
        assert_eq!(ds.n(), 625);
        assert_eq!(ds.feature_count(), 4);
        assert_eq!(ds.class_histogram(), vec![49, 288, 288]);
    }

    #[test]
    fn tic_tac_toe_counts() {
        let ds = tic_tac_toe().unwrap();
        assert_eq!(ds.n(), 958);
        assert_eq!(ds.feature_count(), 9);
        // 626 x-wins; the rest are o-wins (316) and draws (16).
        assert_eq!(ds.class_histogram(), vec![626, 332]);
    }

    #[test]
    fn tic_tac_toe_deterministic() {
        let a = tic_tac_toe().unwrap();
        let b = tic_tac_toe().unwrap();
        for i in 0..a.n() {
            assert_eq!(a.row(i), b.row(i));
            assert_eq!(a.label(i), b.label(i));
        }
    }

    #[test]
    fn monks2_counts() {
        let ds = monks2().unwrap();
        assert_eq!(ds.n(), 432);
        // Exactly-two-firsts over cardinalities (3,3,2,3,4,2): 142 positives.
        assert_eq!(ds.class_histogram(), vec![290, 142]);
    }
}
