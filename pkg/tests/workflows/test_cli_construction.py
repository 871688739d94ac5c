import json
import tempfile
import unittest
from pathlib import Path

from click.testing import CliRunner

import odolab as od
from odolab.cli import cli
from odolab.core.genlab import disjointify


class TestCLIConstructionWorkflow(unittest.TestCase):
    """Build disjoint prime cycles, save them, then recover one through the CLI."""

    def test_recover_from_saved_elements(self):
        runner = CliRunner()
        vs = disjointify([od.prime_cycle(2, 2), od.prime_cycle(3, 4), od.prime_cycle(5, 7)])

        with tempfile.TemporaryDirectory() as tmp_dir:
            paths = []
            for i, v in enumerate(vs):
                path = Path(tmp_dir) / f"v{i}.json"
                path.write_text(v.to_json())
                paths.append(str(path))
            output_path = Path(tmp_dir) / "recovery.csv"

            result = runner.invoke(
                cli,
                ["recover", *paths, "--index", "0", "--format", "csv", "--out", str(output_path)],
            )

            self.assertEqual(result.exit_code, 0, msg=result.output)
            lines = [l for l in output_path.read_text().splitlines() if not l.startswith("#")]
            self.assertEqual(lines[0], "n,m,exponent,residual")
            self.assertEqual(lines[1:], ["0,1,1,9/32", "0,2,3,3/32", "0,3,15,0/1", "0,crt,15,0/1"])

    def test_construct_report_round_trips_product(self):
        runner = CliRunner()
        result = runner.invoke(cli, ["construct", "--primes", "2,3,5", "--levels", "2,4,7"])
        self.assertEqual(result.exit_code, 0, msg=result.output)

        data = json.loads(result.output)
        product = od.Element.model_validate(data["results"]["product"])
        self.assertEqual(product.periodicity(), 30)
        self.assertEqual(product.index(), 0)


if __name__ == "__main__":
    unittest.main()
