import json
import logging
import os

import pytest

from main import EXIT_ARTIFACT, EXIT_CONFIG, EXIT_IO, EXIT_OK, main
from numeric.tensor import get_default_dtype

TINY = """\
n_subcarriers=24
n_symbols=4
kernel1=3,2
kernel2=2,3
c1=2
c=2
patch=6
d=8
heads=2
reduction=2
batch_size=8
max_epochs=2
warmup=0
"""


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / 'tiny.cfg').write_text(TINY, encoding='utf-8')
    return tmp_path


def generate(workdir, name='data.bin', samples=110):
    return main(['generate', '--config', 'tiny.cfg', '--samples', str(samples), '--out', str(workdir / name)])


def test_generate(workdir, capsys):
    assert generate(workdir) == EXIT_OK
    line = capsys.readouterr().out.strip()
    assert '110 samples' in line
    assert (workdir / 'run.log').exists()
    assert (workdir / 'run-manifest.txt').exists()


def test_generate_is_reproducible(workdir):
    assert generate(workdir, 'a.bin') == EXIT_OK
    assert generate(workdir, 'b.bin') == EXIT_OK
    assert (workdir / 'a.bin').read_bytes() == (workdir / 'b.bin').read_bytes()


def test_generate_rejects_bad_sample_count(workdir):
    assert generate(workdir, samples=0) == EXIT_CONFIG
    assert generate(workdir, samples=23) == EXIT_CONFIG
    assert not (workdir / 'data.bin').exists()


def test_unknown_config_key(workdir):
    (workdir / 'bad.cfg').write_text("subcarriers=24\n", encoding='utf-8')
    assert main(['generate', '--config', 'bad.cfg', '--out', str(workdir / 'x.bin')]) == EXIT_CONFIG


def test_missing_dataset(workdir):
    assert main(['eval', '--config', 'tiny.cfg', '--method', 'ls', '--dataset', 'absent.bin',
                 '--out', str(workdir / 'report.csv')]) == EXIT_IO


def train(workdir, name='model.weights', *extra):
    return main(['train', '--config', 'tiny.cfg', '--dataset', str(workdir / 'data.bin'),
                 '--out', str(workdir / name)] + list(extra))


def test_train_writes_checkpoint_and_history(workdir):
    assert generate(workdir) == EXIT_OK
    assert train(workdir) == EXIT_OK
    assert (workdir / 'model.weights').exists()
    assert (workdir / 'model.weights.meta').exists()
    rows = (workdir / 'model.history.csv').read_text(encoding='utf-8').splitlines()
    assert rows[0] == 'epoch,train_loss,val_loss,lr'
    assert 1 <= len(rows) - 1 <= 2


def test_train_is_reproducible(workdir):
    assert generate(workdir) == EXIT_OK
    assert train(workdir, 'a.weights') == EXIT_OK
    assert train(workdir, 'b.weights') == EXIT_OK
    assert (workdir / 'a.weights').read_bytes() == (workdir / 'b.weights').read_bytes()
    assert (workdir / 'a.history.csv').read_bytes() == (workdir / 'b.history.csv').read_bytes()


def test_train_zero_epochs(workdir):
    assert generate(workdir) == EXIT_OK
    assert train(workdir, 'init.weights', '--epochs', '0') == EXIT_OK
    assert (workdir / 'init.weights').exists()
    assert (workdir / 'init.history.csv').read_text(encoding='utf-8').splitlines() == ['epoch,train_loss,val_loss,lr']


def test_eval_baseline_without_checkpoint(workdir, capsys):
    assert generate(workdir) == EXIT_OK
    capsys.readouterr()
    report = workdir / 'report.csv'
    assert main(['eval', '--config', 'tiny.cfg', '--dataset', str(workdir / 'data.bin'), '--method', 'ls',
                 '--out', str(report)]) == EXIT_OK
    lines = report.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'method,snr_db,nmse_linear,nmse_db,sample_count'
    assert len(lines) == 12
    assert all(line.startswith('ls,') for line in lines[1:])
    assert json.loads((workdir / 'report.json').read_text(encoding='utf-8'))['reference'] == 'ls'
    assert capsys.readouterr().out.startswith('ls\t')


def test_eval_all_methods(workdir, capsys):
    assert generate(workdir) == EXIT_OK
    assert train(workdir) == EXIT_OK
    capsys.readouterr()
    report = workdir / 'report.csv'
    assert main(['eval', '--config', 'tiny.cfg', '--dataset', str(workdir / 'data.bin'),
                 '--checkpoint', str(workdir / 'model.weights'), '--out', str(report)]) == EXIT_OK
    methods = {line.split(',')[0] for line in report.read_text(encoding='utf-8').splitlines()[1:]}
    assert methods == {'helena', 'ls', 'lsli'}
    out = capsys.readouterr().out
    assert '% vs helena' in out


def test_eval_rejects_corrupt_checkpoint(workdir):
    assert generate(workdir) == EXIT_OK
    (workdir / 'broken.weights').write_bytes(b'HELW1\x00garbage')
    report = workdir / 'report.csv'
    code = main(['eval', '--config', 'tiny.cfg', '--dataset', str(workdir / 'data.bin'),
                 '--checkpoint', str(workdir / 'broken.weights'), '--method', 'helena', '--out', str(report)])
    assert code == EXIT_ARTIFACT
    assert not report.exists()


def test_eval_rejects_mismatched_grid(workdir):
    assert generate(workdir) == EXIT_OK
    # no --config: the default 612 x 14 grid does not fit the tiny dataset
    code = main(['eval', '--dataset', str(workdir / 'data.bin'), '--method', 'ls', '--out', str(workdir / 'r.csv')])
    assert code == EXIT_ARTIFACT


def test_bench_fresh(workdir, capsys):
    out = workdir / 'bench.json'
    assert main(['bench', '--config', 'tiny.cfg', '--fresh', '--runs', '1', '--precision', 'float64',
                 '--out', str(out)]) == EXIT_OK
    document = json.loads(out.read_text(encoding='utf-8'))
    assert document['latency']['runs'] == 1
    assert document['param_count'] > 0
    assert document['flop_count'] == sum(entry['flops'] for entry in document['flop_breakdown'])
    assert get_default_dtype().__name__ == 'float32'
    assert capsys.readouterr().out.startswith('params\t')


def test_bench_without_se_has_fewer_params(workdir):
    with_se, without_se = workdir / 'se.json', workdir / 'nose.json'
    assert main(['bench', '--config', 'tiny.cfg', '--fresh', '--runs', '1', '--out', str(with_se)]) == EXIT_OK
    assert main(['bench', '--config', 'tiny.cfg', '--fresh', '--runs', '1', '--no-se',
                 '--out', str(without_se)]) == EXIT_OK
    a = json.loads(with_se.read_text(encoding='utf-8'))['param_count']
    b = json.loads(without_se.read_text(encoding='utf-8'))['param_count']
    assert a - b == 2 * 8 * 4 + 4 + 8


def test_run_log_is_written_next_to_output(workdir):
    sub = workdir / 'runs'
    assert main(['bench', '--config', 'tiny.cfg', '--fresh', '--runs', '1', '--out', str(sub / 'b.json')]) == EXIT_OK
    assert 'inference latency' in (sub / 'run.log').read_text(encoding='utf-8')
    assert os.path.exists(sub / 'run-manifest.txt')


def test_unwritable_run_dir_is_io_error(workdir):
    (workdir / 'blocker').write_text('', encoding='utf-8')
    before = list(logging.getLogger().handlers)
    out = workdir / 'blocker' / 'ds.bin'
    assert main(['generate', '--config', 'tiny.cfg', '--samples', '11', '--out', str(out)]) == EXIT_IO
    assert logging.getLogger().handlers == before
    assert get_default_dtype().__name__ == 'float32'
