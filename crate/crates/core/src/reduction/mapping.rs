use std::collections::{BTreeMap, HashMap};

use crate::error::{Result, RsepError};
use crate::model::{count_linked, Allocation, Instance};
use crate::reduction::Rbam;

type Column = Vec<Option<usize>>;

/// Maps an optimal allocation onto an aggregated RBAM with `Z / k` columns
/// whose `k`-fold replication has exactly the same number of links.
///
/// Rows are paired one at a time. The first row is the one with the fewest
/// distinct MVNOs; each following row is the unprocessed row sharing the
/// most links with the previously paired one. A row is paired once, within
/// every class of columns agreeing on all already-paired rows, each of its
/// labels occurs a multiple of `k` times. Pairing uses partial column swaps
/// restricted to unpaired rows that leave the total link count unchanged.
/// Whenever `k` columns are identical they are moved to the output.
///
/// Fails with [`RsepError::AggregationStuck`] if no link-preserving swap
/// makes progress; that can only happen for non-optimal inputs or instances
/// where aggregation loses links.
pub fn aggregate_solution(instance: &Instance, alloc: &Allocation, k: usize) -> Result<Rbam> {
    let z = instance.num_rbs();
    let divisible = instance.profile().iter().flatten().all(|&l| l % k as u64 == 0);
    if k <= 1 || !z.is_multiple_of(k) || !divisible {
        return Err(RsepError::NotAggregable);
    }
    let target = count_linked(instance, alloc)?;
    let input = Rbam::from_allocation(alloc)?;
    let nb = instance.num_bs();

    let mut columns: Vec<Column> = (0..z).map(|c| input.column(c)).collect();
    let mut aggregated: Vec<Column> = Vec::new();
    extract_identical(&mut columns, &mut aggregated, k);

    let mut paired: Vec<usize> = Vec::new();
    if !columns.is_empty() {
        let work = Rbam::from_columns(nb, &columns);
        let first = (0..nb)
            .min_by_key(|&b| (work.distinct_mvnos(b), b))
            .expect("B >= 1");
        paired.push(first);
        sort_by_rows(&mut columns, &paired);
    }

    while !columns.is_empty() && paired.len() < nb {
        extract_identical(&mut columns, &mut aggregated, k);
        if columns.is_empty() {
            break;
        }
        let mut work = Rbam::from_columns(nb, &columns);
        let last = *paired.last().expect("non-empty");
        let next = (0..nb)
            .filter(|b| !paired.contains(b))
            .max_by_key(|&b| (work.shared_links(instance, last, b), std::cmp::Reverse(b)))
            .expect("an unpaired row remains");
        pair_row(instance, &mut work, &paired, next, k)?;
        paired.push(next);
        columns = (0..work.cols()).map(|c| work.column(c)).collect();
        sort_by_rows(&mut columns, &paired);
    }

    // every row is paired, so equal columns come in multiples of k
    columns.sort();
    for chunk in columns.chunks(k) {
        if chunk.iter().any(|c| c != &chunk[0]) {
            return Err(RsepError::AggregationStuck {
                row: usize::MAX,
                reason: "columns left unpaired after all rows were processed".into(),
                state: Rbam::from_columns(nb, &columns).to_string(),
            });
        }
        aggregated.push(chunk[0].clone());
    }

    let result = Rbam::from_columns(nb, &aggregated);
    let reached = result.replicate_columns(k).links(instance);
    if reached != target {
        return Err(RsepError::AggregationStuck {
            row: usize::MAX,
            reason: format!("link count changed from {target} to {reached}"),
            state: result.to_string(),
        });
    }
    result.check_quotas(instance, k as u64)?;
    Ok(result)
}

/// Moves every full set of `k` identical columns to `out` (one
/// representative each).
fn extract_identical(columns: &mut Vec<Column>, out: &mut Vec<Column>, k: usize) {
    let mut counts: BTreeMap<&Column, usize> = BTreeMap::new();
    for col in columns.iter() {
        *counts.entry(col).or_insert(0) += 1;
    }
    let mut to_remove: HashMap<Column, usize> = HashMap::new();
    for (col, count) in counts {
        let groups = count / k;
        if groups > 0 {
            out.extend(std::iter::repeat_n(col.clone(), groups));
            to_remove.insert(col.clone(), groups * k);
        }
    }
    columns.retain(|col| match to_remove.get_mut(col) {
        Some(left) if *left > 0 => {
            *left -= 1;
            false
        }
        _ => true,
    });
}

/// Coherent column sort keyed by the given rows.
fn sort_by_rows(columns: &mut [Column], rows: &[usize]) {
    columns.sort_by(|a, b| {
        rows.iter()
            .map(|&r| a[r])
            .cmp(rows.iter().map(|&r| b[r]))
    });
}

fn class_keys(work: &Rbam, paired: &[usize]) -> Vec<Vec<Option<usize>>> {
    (0..work.cols())
        .map(|c| paired.iter().map(|&r| work.get(r, c)).collect())
        .collect()
}

/// Entries of `row` that cannot yet be grouped: per class of columns with
/// equal paired-row entries, the sum of label counts modulo `k`.
fn imbalance(work: &Rbam, keys: &[Vec<Option<usize>>], row: usize, k: usize) -> usize {
    let mut counts: HashMap<(&[Option<usize>], Option<usize>), usize> = HashMap::new();
    for (c, key) in keys.iter().enumerate() {
        *counts.entry((key.as_slice(), work.get(row, c))).or_insert(0) += 1;
    }
    counts.values().map(|n| n % k).sum()
}

fn pair_row(instance: &Instance, work: &mut Rbam, paired: &[usize], row: usize, k: usize) -> Result<()> {
    let keys = class_keys(work, paired);
    let others: Vec<usize> = (0..work.rows())
        .filter(|r| *r != row && !paired.contains(r))
        .collect();
    // subsets of the other unpaired rows, fewest rows first
    let mut subsets: Vec<u64> = (0..1u64 << others.len()).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));

    loop {
        let current = imbalance(work, &keys, row, k);
        if current == 0 {
            return Ok(());
        }
        let mut progressed = false;
        'search: for &subset in &subsets {
            let mut rows = vec![row];
            rows.extend(
                others
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| subset >> i & 1 == 1)
                    .map(|(_, &r)| r),
            );
            for c1 in 0..work.cols() {
                for c2 in c1 + 1..work.cols() {
                    if keys[c1] == keys[c2] || work.get(row, c1) == work.get(row, c2) {
                        continue;
                    }
                    if work.partial_swap_delta(instance, &rows, c1, c2) != 0 {
                        continue;
                    }
                    work.partial_swap(&rows, c1, c2);
                    if imbalance(work, &keys, row, k) < current {
                        progressed = true;
                        break 'search;
                    }
                    work.partial_swap(&rows, c1, c2);
                }
            }
        }
        if !progressed {
            return Err(RsepError::AggregationStuck {
                row,
                reason: format!("no link-preserving partial swap reduces the {current} unpaired entries"),
                state: work.to_string(),
            });
        }
    }
}
