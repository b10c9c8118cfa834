import numpy as np
import pytest

from bsembed import netio, pairfeat
from bsembed.spectral import Embedding


def make_embedding(coords, columns=None):
    coords = np.asarray(coords, dtype=np.float64)
    cols = np.arange(coords.shape[1]) if columns is None else np.asarray(columns)
    return Embedding(
        coords=coords,
        source_columns=cols,
        variant_tag="test",
        values_used=np.zeros(coords.shape[1]),
    )


def random_setup(rng, n_nodes=10, n_dims=4, n_diseases=4, rr_rows=None):
    coords = rng.normal(size=(n_nodes, n_dims))
    gene_ids = [10 * (i + 1) for i in range(n_nodes)]
    index_map = {g: i for i, g in enumerate(gene_ids)}
    gene_sets = {}
    names = []
    for d in range(n_diseases):
        size = int(rng.integers(1, 5))
        genes = rng.choice(gene_ids, size=size, replace=False)
        name = f"dz{d}"
        names.append(name)
        gene_sets[name] = set(int(g) for g in genes)
    dmap = netio.DiseaseGeneMap(diseases=tuple(names), gene_sets=gene_sets)
    if rr_rows is None:
        rr_rows = tuple(
            (names[i], names[j], float(rng.uniform(0, 2)))
            for i in range(n_diseases) for j in range(i + 1, n_diseases)
        )
    labels = netio.label_pairs(netio.RRTable(rows=rr_rows), 1.0)
    return make_embedding(coords), dmap, labels, index_map


class TestDiseaseFeature:
    def test_single_gene_equals_row(self):
        rng = np.random.default_rng(0)
        emb = make_embedding(rng.normal(size=(5, 3)))
        index_map = {100: 2}
        feat = pairfeat.disease_feature(emb, {100}, index_map)
        assert np.array_equal(feat.values, emb.coords[2])

    def test_two_genes_sum(self):
        rng = np.random.default_rng(1)
        emb = make_embedding(rng.normal(size=(5, 3)))
        index_map = {100: 1, 200: 3}
        feat = pairfeat.disease_feature(emb, {100, 200}, index_map)
        assert np.allclose(feat.values, emb.coords[1] + emb.coords[3])

    def test_matches_naive_double_loop_oracle(self):
        rng = np.random.default_rng(2)
        emb = make_embedding(rng.normal(size=(10, 4)))
        gene_ids = list(range(100, 200, 10))
        index_map = {g: i for i, g in enumerate(gene_ids)}
        genes = set(int(g) for g in rng.choice(gene_ids, size=5, replace=False))
        feat = pairfeat.disease_feature(emb, genes, index_map)
        # oracle: per-entry summation in ascending node-index order
        rows = sorted(index_map[g] for g in genes)
        for k in range(4):
            acc = 0.0
            for r in rows:
                acc += emb.coords[r, k]
            assert feat.values[k] == acc

    def test_empty_gene_set_is_error(self):
        emb = make_embedding(np.zeros((3, 2)))
        with pytest.raises(ValueError, match="empty gene set"):
            pairfeat.disease_feature(emb, set(), {}, disease="x")


class TestAssembleDataset:
    def test_sample_length_2m(self):
        rng = np.random.default_rng(3)
        emb, dmap, labels, index_map = random_setup(rng, n_dims=3, n_diseases=2)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        assert ds.features.shape == (1, 6)
        assert len(ds.column_origin) == 6

    def test_order_is_rr_file_order(self):
        rng = np.random.default_rng(4)
        emb, dmap, labels, index_map = random_setup(rng, n_diseases=4)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        assert ds.pairs == tuple((a, b) for a, b, _ in labels.pairs)
        assert np.array_equal(ds.labels, [lab for _, _, lab in labels.pairs])

    def test_concatenation_layout(self):
        rng = np.random.default_rng(5)
        emb, dmap, labels, index_map = random_setup(rng, n_dims=4, n_diseases=2)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        a, b, _ = labels.pairs[0]
        fa = pairfeat.disease_feature(emb, dmap.gene_sets[a], index_map).values
        fb = pairfeat.disease_feature(emb, dmap.gene_sets[b], index_map).values
        assert np.array_equal(ds.features[0], np.concatenate([fa, fb]))
        assert ds.column_origin[:4] == tuple(("a", c) for c in range(4))
        assert ds.column_origin[4:] == tuple(("b", c) for c in range(4))

    def test_column_swap_permutes_both_halves(self):
        rng = np.random.default_rng(6)
        emb, dmap, labels, index_map = random_setup(rng, n_dims=3, n_diseases=3)
        perm = [2, 0, 1]
        emb_swapped = make_embedding(emb.coords[:, perm], columns=perm)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        ds_swapped = pairfeat.assemble_dataset(emb_swapped, dmap, labels, index_map)
        m = 3
        for slot in (0, 1):
            for new_pos, old_col in enumerate(perm):
                assert np.array_equal(
                    ds_swapped.features[:, slot * m + new_pos],
                    ds.features[:, slot * m + old_col],
                )

    def test_bit_stable_across_runs(self):
        rng1 = np.random.default_rng(7)
        rng2 = np.random.default_rng(7)
        emb1, dmap1, labels1, im1 = random_setup(rng1)
        emb2, dmap2, labels2, im2 = random_setup(rng2)
        ds1 = pairfeat.assemble_dataset(emb1, dmap1, labels1, im1)
        ds2 = pairfeat.assemble_dataset(emb2, dmap2, labels2, im2)
        assert np.array_equal(ds1.features, ds2.features)
        assert ds1.pairs == ds2.pairs

    def test_features_finite(self):
        rng = np.random.default_rng(8)
        emb, dmap, labels, index_map = random_setup(rng, n_nodes=20, n_diseases=6)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        assert np.isfinite(ds.features).all()

    def test_canonical_order_swaps_slots(self):
        rng = np.random.default_rng(15)
        emb, dmap, _, index_map = random_setup(rng, n_dims=2, n_diseases=2)
        rows = ((dmap.diseases[1], dmap.diseases[0], 2.0),)  # reversed in the file
        labels = netio.label_pairs(netio.RRTable(rows=rows), 1.0)
        plain = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        canon = pairfeat.assemble_dataset(emb, dmap, labels, index_map, canonical_order=True)
        assert plain.pairs[0] == (dmap.diseases[1], dmap.diseases[0])
        assert canon.pairs[0] == (dmap.diseases[0], dmap.diseases[1])
        m = 2
        assert np.array_equal(canon.features[0, :m], plain.features[0, m:])
        assert np.array_equal(canon.features[0, m:], plain.features[0, :m])


class TestSelectCoordinates:
    def test_select_all_is_identity(self):
        rng = np.random.default_rng(9)
        emb, dmap, labels, index_map = random_setup(rng, n_dims=4)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        same = pairfeat.select_coordinates(ds, range(4))
        assert np.array_equal(same.features, ds.features)
        assert same.column_origin == ds.column_origin

    def test_single_column(self):
        rng = np.random.default_rng(10)
        emb, dmap, labels, index_map = random_setup(rng, n_dims=4)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        one = pairfeat.select_coordinates(ds, [2])
        assert one.features.shape[1] == 2
        assert np.array_equal(one.features[:, 0], ds.features[:, 2])
        assert np.array_equal(one.features[:, 1], ds.features[:, 6])
        assert one.column_origin == (("a", 2), ("b", 2))

    def test_unknown_column_is_error(self):
        rng = np.random.default_rng(11)
        emb, dmap, labels, index_map = random_setup(rng, n_dims=3)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        with pytest.raises(ValueError, match="unknown embedding column"):
            pairfeat.select_coordinates(ds, [5])

    def test_commutes_with_rebuild_exactly(self):
        # the identity the greedy scan relies on: restrict-then-sum equals
        # sum-then-select, bit for bit
        rng = np.random.default_rng(12)
        for trial in range(20):
            n_dims = int(rng.integers(2, 7))
            emb, dmap, labels, index_map = random_setup(
                rng, n_nodes=12, n_dims=n_dims, n_diseases=5
            )
            ds_full = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
            n_keep = int(rng.integers(1, n_dims + 1))
            keep = sorted(int(c) for c in rng.choice(n_dims, size=n_keep, replace=False))
            restricted_emb = make_embedding(emb.coords[:, keep], columns=keep)
            ds_rebuilt = pairfeat.assemble_dataset(restricted_emb, dmap, labels, index_map)
            ds_selected = pairfeat.select_coordinates(ds_full, keep)
            assert np.array_equal(ds_rebuilt.features, ds_selected.features)
            assert ds_rebuilt.column_origin == ds_selected.column_origin


class TestSubsetAndExport:
    def test_subset_samples(self):
        rng = np.random.default_rng(13)
        emb, dmap, labels, index_map = random_setup(rng, n_diseases=5)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        sub = pairfeat.subset_samples(ds, [2, 0])
        assert np.array_equal(sub.features[0], ds.features[2])
        assert sub.pairs == (ds.pairs[2], ds.pairs[0])

    def test_csv_export_header(self, tmp_path):
        rng = np.random.default_rng(14)
        emb, dmap, labels, index_map = random_setup(rng, n_dims=2, n_diseases=2)
        ds = pairfeat.assemble_dataset(emb, dmap, labels, index_map)
        path = tmp_path / "ds.csv"
        pairfeat.write_dataset(ds, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "disease_a,disease_b,label,f_0,f_1,f_2,f_3"
        assert len(lines) == 1 + ds.n_samples
