//! Window statistics and feature bookkeeping.
//!
//! Every channel of a window is summarised by the same fixed block of
//! statistics; the potential-difference channel additionally reports how
//! often it hit the clip band. A `FeatureSchema` names each column so models,
//! reports and standardisers can be checked against each other instead of
//! trusting positional conventions.
//!
//! Pairwise tasks concatenate the two agents' blocks. To keep a pair's
//! feature vector independent of who happened to be listed first, the agent
//! with the lexicographically smaller id always takes slot 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{LabeledWindow, Source};

// ---------------------------------------------------------------------------
// names and schemas
// ---------------------------------------------------------------------------

/// One summary statistic over a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    /// Population standard deviation.
    Std,
    Min,
    Max,
    Rms,
    MeanAbs,
    /// Strict sign changes between consecutive samples.
    ZeroCrossings,
    /// Share of samples that exceeded the clip band (potential channel only).
    ClippedFraction,
}

impl Statistic {
    pub fn token(self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Std => "std",
            Statistic::Min => "min",
            Statistic::Max => "max",
            Statistic::Rms => "rms",
            Statistic::MeanAbs => "mean_abs",
            Statistic::ZeroCrossings => "zero_crossings",
            Statistic::ClippedFraction => "clipped_fraction",
        }
    }

    /// The statistics computed for a channel, in column order.
    pub fn for_source(source: Source) -> &'static [Statistic] {
        const COMMON: [Statistic; 7] = [
            Statistic::Mean,
            Statistic::Std,
            Statistic::Min,
            Statistic::Max,
            Statistic::Rms,
            Statistic::MeanAbs,
            Statistic::ZeroCrossings,
        ];
        const WITH_CLIP: [Statistic; 8] = [
            Statistic::Mean,
            Statistic::Std,
            Statistic::Min,
            Statistic::Max,
            Statistic::Rms,
            Statistic::MeanAbs,
            Statistic::ZeroCrossings,
            Statistic::ClippedFraction,
        ];
        match source {
            Source::EWrist => &WITH_CLIP,
            Source::AWrist | Source::ACalf => &COMMON,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Fully-qualified column name. `slot` distinguishes the agents of a pair;
/// single-agent vectors use slot 0 throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeatureName {
    pub slot: u8,
    pub source: Source,
    pub statistic: Statistic,
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agent{}.{}.{}", self.slot, self.source, self.statistic)
    }
}

/// Ordered list of feature columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub names: Vec<FeatureName>,
}

impl FeatureSchema {
    /// Single-agent schema over the given channels. Input order and
    /// duplicates do not matter; columns always come out in canonical
    /// channel order.
    pub fn for_sources(sources: &[Source]) -> FeatureSchema {
        let mut picked: Vec<Source> = Source::ALL
            .into_iter()
            .filter(|s| sources.contains(s))
            .collect();
        picked.dedup();
        let names = picked
            .into_iter()
            .flat_map(|source| {
                Statistic::for_source(source).iter().map(move |&statistic| FeatureName {
                    slot: 0,
                    source,
                    statistic,
                })
            })
            .collect();
        FeatureSchema { names }
    }

    /// Two-agent schema: this schema as slot 0, then the same block as
    /// slot 1.
    pub fn paired(&self) -> FeatureSchema {
        let mut names = self.names.clone();
        names.extend(self.names.iter().map(|n| FeatureName { slot: 1, ..*n }));
        FeatureSchema { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Column names as display strings, e.g. `agent0.e_wrist.mean`.
    pub fn name_strings(&self) -> Vec<String> {
        self.names.iter().map(|n| n.to_string()).collect()
    }
}

// ---------------------------------------------------------------------------
// extraction
// ---------------------------------------------------------------------------

/// A feature vector and the schema naming its columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub schema: FeatureSchema,
    pub values: Vec<f64>,
}

impl FeatureVector {
    /// Pulls the columns of `schema` out of this vector. Every requested
    /// column must exist here.
    pub fn select(&self, schema: &FeatureSchema) -> Result<FeatureVector> {
        let values = schema
            .names
            .iter()
            .map(|name| {
                self.schema
                    .names
                    .iter()
                    .position(|n| n == name)
                    .map(|i| self.values[i])
                    .ok_or_else(|| Error::invalid(format!("column {name} is not available")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(FeatureVector {
            schema: schema.clone(),
            values,
        })
    }
}

fn mean(data: &[f64]) -> f64 {
    data.iter().sum::<f64>() / data.len() as f64
}

fn zero_crossings(data: &[f64]) -> usize {
    data.windows(2).filter(|p| p[0] * p[1] < 0.0).count()
}

fn channel_stats(data: &[f64], statistic: Statistic, clipped: &[bool]) -> f64 {
    match statistic {
        Statistic::Mean => mean(data),
        Statistic::Std => {
            let m = mean(data);
            (data.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / data.len() as f64).sqrt()
        }
        Statistic::Min => data.iter().copied().fold(f64::INFINITY, f64::min),
        Statistic::Max => data.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Statistic::Rms => (data.iter().map(|&x| x * x).sum::<f64>() / data.len() as f64).sqrt(),
        Statistic::MeanAbs => data.iter().map(|x| x.abs()).sum::<f64>() / data.len() as f64,
        Statistic::ZeroCrossings => zero_crossings(data) as f64,
        Statistic::ClippedFraction => {
            clipped.iter().filter(|&&c| c).count() as f64 / clipped.len() as f64
        }
    }
}

/// Computes the slot-0 feature vector of one window under `schema`. Errors
/// when the window lacks a channel the schema asks for, or the window is
/// empty.
pub fn extract_features(window: &LabeledWindow, schema: &FeatureSchema) -> Result<FeatureVector> {
    let mut values = Vec::with_capacity(schema.len());
    for name in &schema.names {
        if name.slot != 0 {
            return Err(Error::invalid(format!(
                "extract_features fills slot 0 only; schema asks for {name}"
            )));
        }
        let data = window.channels.get(&name.source).ok_or_else(|| {
            Error::invalid(format!(
                "window of {} at {}s lacks channel {}",
                window.agent_id, window.start_s, name.source
            ))
        })?;
        if data.is_empty() {
            return Err(Error::invalid(format!(
                "window of {} at {}s has an empty {} channel",
                window.agent_id, window.start_s, name.source
            )));
        }
        if name.statistic == Statistic::ClippedFraction && window.e_clipped.len() != data.len() {
            return Err(Error::invalid(format!(
                "window of {} at {}s: clip flags cover {} samples but {} has {}",
                window.agent_id,
                window.start_s,
                window.e_clipped.len(),
                name.source,
                data.len()
            )));
        }
        values.push(channel_stats(data, name.statistic, &window.e_clipped));
    }
    Ok(FeatureVector {
        schema: schema.clone(),
        values,
    })
}

/// Joins two agents' slot-0 vectors into one pair vector. Both must share
/// the schema and the window start; the lexicographically smaller agent id
/// takes slot 0, so (a, b) and (b, a) give identical results.
pub fn pair_join(
    a_agent: &str,
    a_start_s: f64,
    a: &FeatureVector,
    b_agent: &str,
    b_start_s: f64,
    b: &FeatureVector,
) -> Result<FeatureVector> {
    if a_agent == b_agent {
        return Err(Error::invalid(format!(
            "a pair needs two distinct agents, got {a_agent:?} twice"
        )));
    }
    if a.schema != b.schema {
        return Err(Error::invalid("pair_join requires identical schemas"));
    }
    if (a_start_s - b_start_s).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "pair windows are not aligned: {a_start_s}s vs {b_start_s}s"
        )));
    }
    let (first, second) = if a_agent < b_agent { (a, b) } else { (b, a) };
    let mut values = first.values.clone();
    values.extend_from_slice(&second.values);
    Ok(FeatureVector {
        schema: a.schema.paired(),
        values,
    })
}

// ---------------------------------------------------------------------------
// standardisation
// ---------------------------------------------------------------------------

/// Column-wise z-scoring fitted on training rows. Constant columns get a
/// floored deviation so they map to zero instead of blowing up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

const STD_FLOOR: f64 = 1e-8;

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Standardizer> {
        let first = rows
            .first()
            .ok_or_else(|| Error::invalid("cannot fit a standardizer on zero rows"))?;
        let dim = first.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("standardizer rows differ in length"));
        }
        if dim == 0 {
            return Err(Error::invalid("standardizer rows are empty"));
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((v, &m), &x) in var.iter_mut().zip(&mean).zip(row) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var
            .into_iter()
            .map(|v| (v / n).sqrt().max(STD_FLOOR))
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(Error::invalid(format!(
                "standardizer fitted on {} columns, got a row with {}",
                self.dim(),
                row.len()
            )));
        }
        Ok(row
            .iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((&x, &m), &s)| (x - m) / s)
            .collect())
    }

    pub fn invert(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(Error::invalid(format!(
                "standardizer fitted on {} columns, got a row with {}",
                self.dim(),
                row.len()
            )));
        }
        Ok(row
            .iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((&z, &m), &s)| z * s + m)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::LabelClass;
    use crate::preprocess::{WindowLabel, Source};
    use std::collections::BTreeMap;

    fn window_with(channels: &[(Source, Vec<f64>)], e_clipped: Vec<bool>) -> LabeledWindow {
        LabeledWindow {
            agent_id: "P1".into(),
            group_id: 1,
            day_index: 1,
            start_s: 0.0,
            duration_s: channels[0].1.len() as f64 / 50.0,
            channels: channels.iter().cloned().collect::<BTreeMap<_, _>>(),
            e_clipped,
            label: WindowLabel {
                class: LabelClass::A3,
                joint: false,
                partner: None,
            },
            purity: 1.0,
            discard: None,
        }
    }

    #[test]
    fn alternating_signal_statistics() {
        let data = vec![-1.0, 1.0, -1.0, 1.0];
        assert_eq!(channel_stats(&data, Statistic::Mean, &[]), 0.0);
        assert_eq!(channel_stats(&data, Statistic::Rms, &[]), 1.0);
        assert_eq!(channel_stats(&data, Statistic::ZeroCrossings, &[]), 3.0);
        assert_eq!(channel_stats(&data, Statistic::Std, &[]), 1.0);
        assert_eq!(channel_stats(&data, Statistic::MeanAbs, &[]), 1.0);
        assert_eq!(channel_stats(&data, Statistic::Min, &[]), -1.0);
        assert_eq!(channel_stats(&data, Statistic::Max, &[]), 1.0);
    }

    #[test]
    fn zero_crossings_need_a_strict_sign_change() {
        // touching zero without crossing does not count
        assert_eq!(zero_crossings(&[1.0, 0.0, 1.0]), 0);
        assert_eq!(zero_crossings(&[1.0, -2.0, 3.0, 4.0]), 2);
    }

    #[test]
    fn schema_orders_channels_canonically() {
        let schema = FeatureSchema::for_sources(&[Source::ACalf, Source::EWrist]);
        assert_eq!(schema.len(), 8 + 7);
        assert_eq!(schema.names[0].source, Source::EWrist);
        assert_eq!(schema.names[7].statistic, Statistic::ClippedFraction);
        assert_eq!(schema.names[8].source, Source::ACalf);
        // duplicates collapse
        let dup = FeatureSchema::for_sources(&[Source::AWrist, Source::AWrist]);
        assert_eq!(dup.len(), 7);
    }

    #[test]
    fn full_schema_has_22_columns_and_44_paired() {
        let schema = FeatureSchema::for_sources(&Source::ALL);
        assert_eq!(schema.len(), 22);
        let paired = schema.paired();
        assert_eq!(paired.len(), 44);
        assert!(paired.names[..22].iter().all(|n| n.slot == 0));
        assert!(paired.names[22..].iter().all(|n| n.slot == 1));
        assert_eq!(paired.names[22].to_string(), "agent1.e_wrist.mean");
    }

    #[test]
    fn extraction_follows_the_schema() {
        let w = window_with(
            &[
                (Source::EWrist, vec![-1.0, 1.0, -1.0, 1.0]),
                (Source::AWrist, vec![1.0, 1.0, 1.0, 1.0]),
            ],
            vec![false, true, false, true],
        );
        let schema = FeatureSchema::for_sources(&[Source::EWrist, Source::AWrist]);
        let v = extract_features(&w, &schema).unwrap();
        assert_eq!(v.values.len(), 15);
        // e_wrist block: mean std min max rms mean_abs zc clipped
        assert_eq!(
            &v.values[..8],
            &[0.0, 1.0, -1.0, 1.0, 1.0, 1.0, 3.0, 0.5]
        );
        // a_wrist block over a constant channel
        assert_eq!(&v.values[8..], &[1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn missing_channel_is_an_error() {
        let w = window_with(&[(Source::AWrist, vec![1.0, 2.0])], vec![]);
        let schema = FeatureSchema::for_sources(&[Source::EWrist]);
        let err = extract_features(&w, &schema).unwrap_err();
        assert!(err.to_string().contains("e_wrist"));
    }

    #[test]
    fn select_pulls_named_columns() {
        let w = window_with(
            &[
                (Source::EWrist, vec![2.0, 2.0]),
                (Source::AWrist, vec![3.0, 3.0]),
            ],
            vec![false, false],
        );
        let all = extract_features(&w, &FeatureSchema::for_sources(&[Source::EWrist, Source::AWrist]))
            .unwrap();
        let narrow = all.select(&FeatureSchema::for_sources(&[Source::AWrist])).unwrap();
        assert_eq!(narrow.values[0], 3.0); // a_wrist mean
        assert!(all
            .select(&FeatureSchema::for_sources(&Source::ALL))
            .is_err());
    }

    #[test]
    fn pair_join_is_order_free() {
        let schema = FeatureSchema::for_sources(&[Source::AWrist]);
        let a = FeatureVector {
            schema: schema.clone(),
            values: vec![1.0; 7],
        };
        let b = FeatureVector {
            schema: schema.clone(),
            values: vec![2.0; 7],
        };
        let ab = pair_join("P1", 3.0, &a, "P2", 3.0, &b).unwrap();
        let ba = pair_join("P2", 3.0, &b, "P1", 3.0, &a).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab.values[..7], [1.0; 7]); // P1 < P2 takes slot 0
        assert_eq!(ab.values[7..], [2.0; 7]);
        assert_eq!(ab.schema, schema.paired());

        assert!(pair_join("P1", 3.0, &a, "P1", 3.0, &b).is_err());
        assert!(pair_join("P1", 3.0, &a, "P2", 4.0, &b).is_err());
    }

    #[test]
    fn standardizer_round_trips() {
        let rows = vec![vec![1.0, 10.0], vec![3.0, 10.0], vec![5.0, 10.0]];
        let st = Standardizer::fit(&rows).unwrap();
        assert_eq!(st.mean, vec![3.0, 10.0]);
        // constant column hits the floor
        assert_eq!(st.std[1], STD_FLOOR);
        let z = st.apply(&rows[0]).unwrap();
        assert!((z[0] - (1.0 - 3.0) / st.std[0]).abs() < 1e-12);
        assert_eq!(z[1], 0.0);
        let back = st.invert(&z).unwrap();
        assert!((back[0] - 1.0).abs() < 1e-12);
        assert!((back[1] - 10.0).abs() < 1e-12);
        assert!(st.apply(&[1.0]).is_err());
        assert!(Standardizer::fit(&[]).is_err());
    }
}
