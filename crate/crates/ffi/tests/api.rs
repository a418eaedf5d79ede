use std::ffi::{CStr, CString};
use std::ptr;

use trellis_astar_ffi::*;

const G3: &str = "3 1\n0 1 1\n";

fn graph(text: &str) -> *mut TaInstance {
    let text = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { ta_instance_from_graph_text(text.as_ptr(), &mut inst) }, TaStatus::Ok);
    inst
}

fn last_error() -> String {
    let p = ta_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn dasgupta_example_through_every_entry_point() {
    let inst = graph(G3);
    assert_eq!(unsafe { ta_instance_size(inst) }, 3);
    let mut res = ptr::null_mut();
    unsafe {
        assert_eq!(ta_exact(inst, TA_COST_DASGUPTA, TA_HEURISTIC_DEFAULT, &mut res), TaStatus::Ok);
        assert_eq!(ta_result_cost(res), 2.0);
        let json = ta_result_tree_json(res);
        let tree: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(tree["members"], serde_json::json!([0, 1, 2]));
        ta_string_free(json);
        ta_result_free(res);

        assert_eq!(ta_greedy(inst, TA_COST_DASGUPTA, &mut res), TaStatus::Ok);
        assert_eq!(ta_result_cost(res), 3.0);
        ta_result_free(res);

        assert_eq!(ta_beam(inst, TA_COST_DASGUPTA, 3, &mut res), TaStatus::Ok);
        assert_eq!(ta_result_cost(res), 2.0);
        ta_result_free(res);

        let opts = ta_approx_options_default();
        assert_eq!(ta_approx(inst, TA_COST_DASGUPTA, TA_HEURISTIC_DEFAULT, &opts, &mut res), TaStatus::Ok);
        assert_eq!(ta_result_cost(res), 2.0);
        ta_result_free(res);
        ta_instance_free(inst);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let bad = CString::new("3 2\n0 1 1\n").unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { ta_instance_from_graph_text(bad.as_ptr(), &mut inst) }, TaStatus::Parse);
    assert!(inst.is_null());
    assert!(last_error().contains("graph"));

    assert_eq!(unsafe { ta_instance_from_graph_text(ptr::null(), &mut inst) }, TaStatus::NullArgument);

    let inst = graph("2 1\n0 1 -1\n");
    let mut res = ptr::null_mut();
    unsafe {
        assert_eq!(ta_exact(inst, TA_COST_DASGUPTA, 0, &mut res), TaStatus::ObjectiveMismatch);
        assert_eq!(ta_exact(inst, TA_COST_GINKGO, 0, &mut res), TaStatus::ObjectiveMismatch);
        assert_eq!(ta_exact(inst, 99, 0, &mut res), TaStatus::Domain);
        assert_eq!(ta_exact(inst, TA_COST_HCC, TA_HEURISTIC_H1, &mut res), TaStatus::Domain);
        let mut opts = ta_approx_options_default();
        opts.top_k = 0;
        assert_eq!(ta_approx(inst, TA_COST_HCC, 0, &opts, &mut res), TaStatus::Domain);
        assert!(last_error().contains("k"));
        assert_eq!(ta_exact(ptr::null(), TA_COST_HCC, 0, &mut res), TaStatus::NullArgument);
        assert!(res.is_null());
        ta_instance_free(inst);
        ta_instance_free(ptr::null_mut());
        ta_result_free(ptr::null_mut());
        assert!(ta_result_cost(ptr::null()).is_nan());
    }
}

#[test]
fn jets_and_points() {
    let jet = r#"{"lambda": 1.5, "t_cut": 4.0, "leaves": [[3, 0, 0, 1], [3, 0, 0, -1], [2, 1, 0, 0]]}"#;
    let jet = CString::new(jet).unwrap();
    let mut inst = ptr::null_mut();
    let mut res = ptr::null_mut();
    unsafe {
        assert_eq!(ta_instance_from_jet_json(jet.as_ptr(), &mut inst), TaStatus::Ok);
        assert_eq!(ta_exact(inst, TA_COST_GINKGO, TA_HEURISTIC_H0, &mut res), TaStatus::Ok);
        assert!(ta_result_cost(res).is_finite());
        assert!(ta_result_nodes_explored(res) >= 1);
        ta_result_free(res);
        ta_instance_free(inst);

        let points = [1.0, 0.0, 0.9, 0.1, 0.0, 1.0, 0.1, 0.9];
        assert_eq!(ta_instance_from_points(points.as_ptr(), 4, 2, &mut inst), TaStatus::Ok);
        assert_eq!(ta_instance_size(inst), 4);
        assert_eq!(ta_exact(inst, TA_COST_HCC, 0, &mut res), TaStatus::Ok);
        let json = ta_result_tree_json(res);
        let tree: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        // The two near-parallel pairs end up as the root's children.
        let mut kids: Vec<_> = tree["children"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["members"].clone())
            .collect();
        kids.sort_by_key(|k| k.to_string());
        assert_eq!(kids, vec![serde_json::json!([0, 1]), serde_json::json!([2, 3])]);
        ta_string_free(json);
        ta_result_free(res);
        ta_instance_free(inst);
    }
}
