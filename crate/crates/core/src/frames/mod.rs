//! Single-moment choice frames and bounded satisfiability search.
//!
//! The satisfaction clauses only look at the histories through the current
//! moment and the choice cells there, so a formula is satisfiable in some
//! finite model with `k` histories at a moment iff it is satisfiable in a
//! root-plus-leaves model built from a [`ChoiceFrame`]. The search
//! enumerates frames by increasing history count; within a size, partition
//! tuples in lexicographic order of their restricted growth strings, then
//! valuations. Only the least member of each isomorphism class is visited,
//! so the reported witness is the globally least one in that order.

mod frame;
mod search;

pub use frame::{
    check_independence, model_history_name, root_name, to_model, ChoiceFrame, FrameError,
    FrameSpec, Selector, ROOT,
};
pub use search::{
    enumerate_frames, expand_frame, sat_search, sat_search_with, CompactFrame, validity_up_to, validity_up_to_with, SearchError, SearchOptions,
    SearchVerdict, ValidityVerdict, LARGE_BOUND, MAX_BOUND,
};

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::semantics::{satisfies_named, validate};
    use crate::syntax::{agent, parse};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("h{i}")).collect()
    }

    #[test]
    fn crosswise_singletons_fail_independence() {
        let partitions = BTreeMap::from([
            (agent(1), vec![vec![0], vec![1]]),
            (agent(2), vec![vec![1], vec![0]]),
        ]);
        let frame = ChoiceFrame::new(labels(2), partitions, vec![]).unwrap();
        let sel = check_independence(&frame).unwrap_err();
        assert_eq!(sel, vec![(agent(1), vec!["h0".to_string()]), (agent(2), vec!["h1".to_string()])]);
        assert!(matches!(to_model(&frame), Err(FrameError::Independence(_))));
    }

    #[test]
    fn single_agent_frames_are_independent() {
        let partitions = BTreeMap::from([(agent(3), vec![vec![0, 2], vec![1]])]);
        let frame = ChoiceFrame::new(labels(3), partitions, vec![]).unwrap();
        assert!(check_independence(&frame).is_ok());
    }

    #[test]
    fn one_history_one_agent() {
        let partitions = BTreeMap::from([(agent(1), vec![vec![0]])]);
        let frame = ChoiceFrame::new(labels(1), partitions, vec![]).unwrap();
        let model = to_model(&frame).unwrap();
        assert!(validate(&model).is_empty());
        assert_eq!(model.histories().len(), 1);
        assert_eq!(model.histories()[0].name, "dag>h0");
    }

    #[test]
    fn malformed_frames_are_rejected() {
        let bad = |p: Vec<Vec<usize>>| {
            ChoiceFrame::new(labels(2), BTreeMap::from([(agent(1), p)]), vec![]).unwrap_err()
        };
        assert!(matches!(bad(vec![vec![0]]), FrameError::Partition { .. }));
        assert!(matches!(bad(vec![vec![0, 1], vec![1]]), FrameError::Partition { .. }));
        assert!(matches!(bad(vec![vec![0, 1], vec![]]), FrameError::Partition { .. }));
        assert!(matches!(
            ChoiceFrame::new(vec![], BTreeMap::new(), vec![]),
            Err(FrameError::Empty)
        ));
        assert!(matches!(
            ChoiceFrame::new(vec!["a".into(), "a".into()], BTreeMap::new(), vec![]),
            Err(FrameError::DuplicateHistory(_))
        ));
    }

    #[test]
    fn frame_json_round_trip() {
        let json = r#"{"histories":["x","y"],"partitions":{"1":[["x"],["y"]]},"valuation":{"x":["p"]}}"#;
        let frame: ChoiceFrame = serde_json::from_str(json).unwrap();
        assert_eq!(frame.partition(agent(1)).unwrap(), &[vec![0], vec![1]]);
        assert!(frame.vars_at(0).contains("p"));
        let back: ChoiceFrame = serde_json::from_str(&serde_json::to_string(&frame).unwrap()).unwrap();
        assert_eq!(back, frame);
        assert!(serde_json::from_str::<ChoiceFrame>(r#"{"histories":["x"],"partitions":{"1":[["z"]]}}"#).is_err());
    }

    #[test]
    fn root_name_avoids_labels() {
        let frame = ChoiceFrame::new(vec!["dag".into()], BTreeMap::new(), vec![]).unwrap();
        assert_eq!(root_name(&frame), "dag_");
        let model = to_model(&frame).unwrap();
        assert!(satisfies_named(&model, "dag_", "dag_>dag", &parse("true").unwrap()).unwrap());
    }

    #[test]
    fn possibly_both_ways_needs_two_histories() {
        match sat_search(&parse("<>p & <>~p").unwrap(), 2).unwrap() {
            SearchVerdict::Satisfiable { frame, history } => {
                assert_eq!(frame.histories().len(), 2);
                assert_eq!(history, "h0");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn independence_refutes_opposite_stits() {
        assert_eq!(
            sat_search(&parse("<>[1]p & <>[2]~p").unwrap(), 3).unwrap(),
            SearchVerdict::NoModelUpTo { bound: 3 }
        );
    }

    #[test]
    fn bottom_is_unsatisfiable() {
        for bound in 1..=3 {
            assert_eq!(
                sat_search(&parse("false").unwrap(), bound).unwrap(),
                SearchVerdict::NoModelUpTo { bound }
            );
        }
    }

    #[test]
    fn countermodels() {
        for f in ["p -> []p", "<>[1]p -> [][1]p"] {
            match validity_up_to(&parse(f).unwrap(), 2).unwrap() {
                ValidityVerdict::Countermodel { frame, .. } => assert!(frame.histories().len() <= 2),
                other => panic!("{f}: unexpected {other:?}"),
            }
        }
        for bound in 1..=3 {
            assert!(validity_up_to(&parse("p -> p").unwrap(), bound).unwrap().is_valid());
        }
    }

    #[test]
    fn bound_gating() {
        let f = parse("p").unwrap();
        assert_eq!(sat_search(&f, 0), Err(SearchError::ZeroBound));
        assert_eq!(sat_search(&f, 4), Err(SearchError::NeedsLarge(4)));
        let opts = SearchOptions {
            allow_large: true,
            ..SearchOptions::default()
        };
        assert!(sat_search_with(&f, 4, &opts).unwrap().is_satisfiable());
        assert_eq!(sat_search_with(&f, 9, &opts), Err(SearchError::TooLarge(9)));
    }

    #[test]
    fn workers_agree_with_sequential_search() {
        let f = parse("<>([1]p & <>[2]q) & <>~q & [3](p | r)").unwrap();
        let seq = sat_search(&f, 3).unwrap();
        for workers in [2, 3, 8] {
            let opts = SearchOptions {
                workers,
                ..SearchOptions::default()
            };
            assert_eq!(sat_search_with(&f, 3, &opts).unwrap(), seq);
        }
    }

    #[test]
    fn frame_evaluation_matches_model_checking() {
        let partitions = BTreeMap::from([
            (agent(1), vec![vec![0, 1], vec![2, 3]]),
            (agent(2), vec![vec![0, 2], vec![1, 3]]),
        ]);
        let valuation = vec![
            BTreeSet::from(["p".to_string()]),
            BTreeSet::new(),
            BTreeSet::from(["p".to_string()]),
            BTreeSet::from(["p".to_string()]),
        ];
        let frame = ChoiceFrame::new(labels(4), partitions, valuation).unwrap();
        let model = to_model(&frame).unwrap();
        for f in ["[1]p", "<2>~p", "[d:1]p", "[]([1]p -> [2]p)", "<>[1]p & <>[2]~p"] {
            let f = parse(f).unwrap();
            for h in 0..4 {
                let label = format!("h{h}");
                assert_eq!(
                    frame.eval(h, &f).unwrap(),
                    satisfies_named(&model, "dag", &format!("dag>{label}"), &f).unwrap()
                );
            }
        }
    }
}
