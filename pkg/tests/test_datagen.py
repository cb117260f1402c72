import re

from jsoniqml.datagen import generate_dataset

LINE_RE = re.compile(
    r"^[a-z]+:\d\.\d{4}(,[a-z]+:\d\.\d{4})+( -?\d+\.\d{3})+$"
)


class TestGenerateDataset:
    def test_line_format(self, tmp_path):
        path = tmp_path / "d.txt"
        generate_dataset(6, 3, 1.0, 0, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 6
        for line in lines:
            assert LINE_RE.match(line), line
            assert len(line.split()) == 4  # tag token + 3 features

    def test_classes_alternate_with_tags(self, tmp_path):
        path = tmp_path / "d.txt"
        generate_dataset(4, 2, 1.0, 1, path)
        lines = path.read_text().splitlines()
        assert "indoor" in lines[0] and "outdoor" not in lines[0].split()[0]
        assert "outdoor" in lines[1]
        assert "indoor" in lines[2]

    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        generate_dataset(50, 8, 1.0, 42, a)
        generate_dataset(50, 8, 1.0, 42, b)
        assert a.read_bytes() == b.read_bytes()

    def test_different_seeds_differ(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        generate_dataset(50, 8, 1.0, 1, a)
        generate_dataset(50, 8, 1.0, 2, b)
        assert a.read_bytes() != b.read_bytes()

    def test_zero_rows_empty_file(self, tmp_path):
        path = tmp_path / "d.txt"
        generate_dataset(0, 3, 1.0, 0, path)
        assert path.read_text() == ""

    def test_cross_seed_separability(self, tmp_path):
        # files from different seeds must share one separating direction
        import math

        d = 16
        vectors = []
        labels = []
        for seed in (7, 8):
            path = tmp_path / f"{seed}.txt"
            generate_dataset(40, d, 1.0, seed, path)
            for line in path.read_text().splitlines():
                parts = line.split()
                labels.append(0 if "indoor" in parts[0] else 1)
                vectors.append([float(v) for v in parts[1:]])
        unit = 1.0 / math.sqrt(d)
        direction = [unit if j % 2 == 0 else -unit for j in range(d)]
        for vec, label in zip(vectors, labels):
            proj = sum(a * b for a, b in zip(vec, direction))
            sign = 1.0 if label == 1 else -1.0
            assert sign * proj >= 0.5 - 0.01  # margin/2 minus formatting rounding
