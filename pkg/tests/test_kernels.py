import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optbench.errors import ShapeMismatch, UnknownModel
from optbench.ir.exprs import ForestSpec, LayerSpec, MLAttrs, TreeNode, TreeSpec
from optbench.kernels import (
    ModelStore,
    aggregate_forest,
    backend,
    conv2d_as_matmul_reference,
    eval_ml,
    get_shape,
    predict_tree,
)
from optbench.kernels import numpy_impl
from optbench.ir.schema import matrix as matrix_dt, vector as vector_dt

try:
    from optbench.kernels import _core
    BACKENDS = [numpy_impl, _core]
except ImportError:
    BACKENDS = [numpy_impl]


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b) / denom)) if a.size else 0.0


class TestMatMul:
    def test_identity_matrix(self):
        out = eval_ml("matrix_multiply", [np.array([1.0, 2.0, 3.0]), np.eye(3)],
                      MLAttrs(kernel_mode="dense"))
        assert np.allclose(out, [1, 2, 3])

    def test_dot_product_squeezes_to_scalar(self):
        out = eval_ml("matrix_multiply", [np.array([1.0, 2.0, 3.0]), np.array([[4.0], [5.0], [6.0]])])
        assert out == pytest.approx(32.0)

    def test_variadic_feature_concat(self):
        out = eval_ml("matrix_multiply", [1.0, np.array([2.0, 3.0]), np.ones((3, 1))])
        assert out == pytest.approx(6.0)

    @pytest.mark.parametrize("nnz", [0.01, 0.1, 0.3, 0.5, 0.8, 1.0])
    def test_dense_sparse_equivalence(self, nnz):
        rng = np.random.default_rng(int(nnz * 100))
        for trial in range(4):
            n, d, m = rng.integers(1, 60), rng.integers(1, 40), rng.integers(1, 10)
            x = rng.standard_normal((n, d)) * (rng.random((n, d)) < nnz)
            w = rng.standard_normal((d, m))
            for impl in BACKENDS:
                assert rel_err(impl.csr_matmul(x, w), x @ w) < 1e-9

    def test_backend_parity(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((50, 30)) * (rng.random((50, 30)) < 0.2)
        w = rng.standard_normal((30, 4))
        outs = [impl.csr_matmul(x, w) for impl in BACKENDS]
        for o in outs[1:]:
            assert rel_err(o, outs[0]) < 1e-9

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            eval_ml("matrix_multiply", [np.array([1.0, 2.0]), np.eye(3)])


class TestActivations:
    def test_sigmoid_symmetry(self):
        assert eval_ml("sigmoid", [0.0]) == pytest.approx(0.5)

    def test_softmax_uniform(self):
        out = eval_ml("softmax", [np.array([0.0, 0.0])])
        assert np.allclose(out, [0.5, 0.5])

    # logit spread capped below ~36 so no output saturates to exactly 1.0
    @given(st.lists(st.floats(-15, 15).map(lambda x: round(x, 4)), min_size=2, max_size=16))
    @settings(max_examples=50, deadline=None)
    def test_softmax_simplex_and_argmax(self, values):
        v = np.array(values)
        out = eval_ml("softmax", [v])
        assert abs(out.sum() - 1.0) <= 1e-12
        assert np.all(out > 0) and np.all(out < 1)
        # argmax agreement needs a unique max at float precision
        top = np.sort(v)[-2:]
        if top[1] - top[0] > 1e-6:
            assert int(np.argmax(out)) == int(np.argmax(v))

    @given(st.floats(-30, 30))
    @settings(max_examples=50, deadline=None)
    def test_sigmoid_in_open_unit_interval(self, x):
        out = eval_ml("sigmoid", [x])
        assert 0.0 < out < 1.0

    def test_relu(self):
        assert np.allclose(eval_ml("relu", [np.array([-1.0, 2.0])]), [0.0, 2.0])


class TestDistanceAndSimilarity:
    def test_l2_default(self):
        d = eval_ml("distance", [np.array([0.0, 0.0]), np.array([3.0, 4.0])])
        assert d == pytest.approx(5.0)

    def test_l1_switch(self):
        d = eval_ml("distance", [np.array([0.0, 0.0]), np.array([3.0, 4.0])], MLAttrs(metric="l1"))
        assert d == pytest.approx(7.0)

    def test_cosine(self):
        s = eval_ml("cosine_sim", [np.array([1.0, 0.0]), np.array([1.0, 1.0])])
        assert s == pytest.approx(1 / np.sqrt(2))


def _leaf(v):
    return TreeNode(-1, 0.0, 0, 0, v)


def _two_tree_forest(aggregation="mean"):
    t1 = TreeSpec((_leaf(1.0),))
    t2 = TreeSpec((_leaf(3.0),))
    return ForestSpec((t1, t2), aggregation)


class TestTrees:
    def test_forest_mean_of_trees(self):
        # oracle: evaluate each tree independently and average
        out = eval_ml("decision_forest", [np.array([1.0])],
                      MLAttrs(tree_spec=_two_tree_forest("mean")))
        assert out == pytest.approx(2.0)

    def test_single_tree_forest_degenerates(self):
        forest = ForestSpec((TreeSpec((_leaf(7.0),)),), "mean")
        out = eval_ml("decision_forest", [np.array([0.0])], MLAttrs(tree_spec=forest))
        tree = eval_ml("decision_tree", [np.array([0.0])], MLAttrs(tree_spec=forest.trees[0]))
        assert out == tree == pytest.approx(7.0)

    def test_forest_equals_per_tree_aggregate(self):
        rng = np.random.default_rng(3)
        from optbench.suite.gen import random_forest

        forest = random_forest(rng, [(0.0, 1.0)] * 5, n_trees=6, depth=3, aggregation="mean")
        x = rng.random((40, 5))
        whole = eval_ml("decision_forest", [x[0]], MLAttrs(tree_spec=forest))
        per_tree = np.stack([predict_tree(t, x[:1]) for t in forest.trees])
        assert whole == aggregate_forest(per_tree, "mean")[0]  # exact

    def test_majority_tie_goes_to_smallest(self):
        per_tree = np.array([[1.0], [0.0]])
        assert aggregate_forest(per_tree, "majority")[0] == 0.0

    def test_backend_parity_tree(self):
        rng = np.random.default_rng(9)
        from optbench.suite.gen import random_tree

        tree = random_tree(rng, [(0.0, 1.0)] * 4, depth=5)
        x = rng.random((100, 4))
        outs = []
        feat, thr, left, right, val = (
            np.array([n.feature for n in tree.nodes], dtype=np.int64),
            np.array([n.threshold for n in tree.nodes]),
            np.array([n.left for n in tree.nodes], dtype=np.int64),
            np.array([n.right for n in tree.nodes], dtype=np.int64),
            np.array([n.value for n in tree.nodes]),
        )
        for impl in BACKENDS:
            outs.append(impl.tree_predict(x, feat, thr, left, right, val))
        for o in outs[1:]:
            assert np.array_equal(o, outs[0])


class TestConv:
    def test_window_sums(self):
        img = np.arange(9.0).reshape(3, 3)
        out = conv2d_as_matmul_reference(img, np.ones((1, 2, 2)))
        # oracle: direct 4-loop convolution
        expected = np.zeros((1, 2, 2))
        for y in range(2):
            for x in range(2):
                expected[0, y, x] = img[y:y + 2, x:x + 2].sum()
        assert np.allclose(out, expected)

    def test_scaling_filter(self):
        img = np.random.default_rng(0).random((4, 4))
        out = conv2d_as_matmul_reference(img, np.array([[[2.5]]]))
        assert np.allclose(out[0], 2.5 * img)

    def test_filter_larger_than_image(self):
        with pytest.raises(ShapeMismatch):
            conv2d_as_matmul_reference(np.ones((2, 2)), np.ones((1, 3, 3)))

    def test_im2col_equals_direct(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            img = rng.standard_normal((rng.integers(4, 12), rng.integers(4, 12)))
            filters = rng.standard_normal((rng.integers(1, 5), 3, 3))
            ref = conv2d_as_matmul_reference(img, filters).ravel()
            for impl in BACKENDS:
                direct = impl.conv2d(img[None], filters)[0]
                assert rel_err(ref, direct) < 1e-9


class TestMockLLM:
    def test_deterministic_binary_output(self):
        ms = ModelStore({"llm": {"kind": "llm", "seed": 3}})
        a = eval_ml("llm", ["prompt", np.array([1.0, 2.0])], MLAttrs(model_id="llm"), ms)
        b = eval_ml("llm", ["prompt", np.array([1.0, 2.0])], MLAttrs(model_id="llm"), ms)
        assert a == b and a in ("0", "1")

    def test_sensitive_to_args_and_seed(self):
        ms = ModelStore({"a": {"kind": "llm", "seed": 1}, "b": {"kind": "llm", "seed": 2}})
        outs = {
            eval_ml("llm", ["p", np.array([float(i)])], MLAttrs(model_id=m), ms)
            for m in ("a", "b") for i in range(20)
        }
        assert outs == {"0", "1"}


class TestOtherKernels:
    def test_min_max_scaler(self):
        ms = ModelStore({"s": {"kind": "scaler", "mins": [0.0, 10.0], "maxs": [2.0, 20.0]}})
        out = eval_ml("min_max_scaler", [1.0, 15.0], MLAttrs(model_id="s"), ms)
        assert np.allclose(out, [0.5, 0.5])

    def test_one_hot(self):
        ms = ModelStore({"e": {"kind": "encoder", "vocabulary": ["x", "y", "z"]}})
        out = eval_ml("one_hot_encoder", ["y"], MLAttrs(model_id="e", out_dim=3), ms)
        assert np.allclose(out, [0, 1, 0])

    def test_kmeans_assigns_nearest(self):
        ms = ModelStore({"k": {"kind": "kmeans", "centroids": [[0.0, 0.0], [10.0, 10.0]]}})
        assert eval_ml("kmeans", [np.array([9.0, 9.0])], MLAttrs(model_id="k"), ms) == 1

    def test_naive_bayes_separates_classes(self):
        ms = ModelStore({"nb": {
            "kind": "naive_bayes",
            "log_priors": [np.log(0.5), np.log(0.5)],
            "token_log_probs": {"good": [-1.0, -5.0], "bad": [-5.0, -1.0]},
            "default_log_prob": [-10.0, -10.0],
        }})
        assert eval_ml("naive_bayes", ["good good"], MLAttrs(model_id="nb"), ms) == 0
        assert eval_ml("naive_bayes", ["bad bad bad"], MLAttrs(model_id="nb"), ms) == 1

    def test_unknown_model(self):
        with pytest.raises(UnknownModel):
            eval_ml("kmeans", [np.array([1.0])], MLAttrs(model_id="missing"), ModelStore())

    def test_fused_dnn_matches_manual_chain(self):
        rng = np.random.default_rng(11)
        w1, b1 = rng.standard_normal((4, 8)), rng.standard_normal(8)
        w2, b2 = rng.standard_normal((8, 2)), rng.standard_normal(2)
        spec = (
            LayerSpec(tuple(map(tuple, w1)), tuple(b1), "relu"),
            LayerSpec(tuple(map(tuple, w2)), tuple(b2), "identity"),
        )
        x = rng.standard_normal(4)
        out = eval_ml("fused_dnn", [x], MLAttrs(layer_spec=spec))
        manual = np.maximum(x @ w1 + b1, 0) @ w2 + b2
        assert rel_err(out, manual) < 1e-9


class TestGetShape:
    def test_matmul_flops_by_explicit_loop(self):
        # oracle: count multiply-add pairs with an explicit loop
        m, k, n = 1, 8, 4
        count = 0
        for _ in range(m):
            for _ in range(k):
                for _ in range(n):
                    count += 2
        info = get_shape("matrix_multiply", MLAttrs(weight_shape=(8, 4)), ModelStore())
        assert info.flops == count == 64
        assert info.num_parameters == 32
        with_bias = get_shape("matrix_multiply", MLAttrs(weight_shape=(8, 4), bias_shape=4), ModelStore())
        assert with_bias.num_parameters == 36

    def test_forest_tree_count(self):
        forest = ForestSpec(tuple(TreeSpec((_leaf(0.0),)) for _ in range(10)), "mean")
        info = get_shape("decision_forest", MLAttrs(tree_spec=forest), ModelStore())
        assert info.forest_num_trees == 10

    def test_fused_dnn_parameter_count(self):
        # layer sums: 8*16+16 + 16*4+4 = 212
        spec = (
            LayerSpec(tuple(tuple(0.0 for _ in range(16)) for _ in range(8)), (0.0,) * 16, "relu"),
            LayerSpec(tuple(tuple(0.0 for _ in range(4)) for _ in range(16)), (0.0,) * 4, "identity"),
        )
        info = get_shape("fused_dnn", MLAttrs(layer_spec=spec), ModelStore())
        assert info.num_parameters == 212

    def test_matmul_flops_on_every_tested_shape(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            k, n = int(rng.integers(1, 30)), int(rng.integers(1, 30))
            info = get_shape("matrix_multiply", MLAttrs(weight_shape=(k, n)), ModelStore())
            madds = sum(2 for _ in range(k) for _ in range(n))
            assert info.flops == madds

    def test_conv_shape_uses_image_dims(self):
        info = get_shape("conv2d", MLAttrs(filter_spec=(4, 3, 3)), ModelStore(),
                         arg_dtypes=[matrix_dt(16, 16)])
        assert info.out_shape == (4 * 14 * 14,)
        assert info.num_parameters == 36
