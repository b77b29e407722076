"""Test for callbacks/logging.py"""

from functools import partial
from unittest.mock import Mock
from unittest.mock import patch

import pytest

from budgetid.algorithms import Uniform


class TestPrintLog:
    @pytest.fixture
    def print_log_cls(self):
        from budgetid.callbacks import PrintLog
        return partial(PrintLog, sink=Mock())

    @pytest.fixture
    def sim_cls(self):
        from budgetid.simulator import Simulator
        return Simulator

    @pytest.fixture
    def sim(self, sim_cls, bai, gaussian_pair):
        return sim_cls(
            Uniform(), bai, gaussian_pair, n_reps=500,
            callbacks__print_log__sink=Mock(),
        )

    @pytest.fixture
    def sink(self, sim):
        sim.rate_curve([4, 8])
        return dict(sim.callbacks_)['print_log'].sink

    def test_call_count(self, sink):
        # header + lines + 2 points
        assert sink.call_count == 4

    def test_header(self, sink):
        columns = sink.call_args_list[0][0][0].split()
        assert columns[0] == 'T'
        assert columns[-1] == 'dur'
        assert columns[1:-1] == sorted(columns[1:-1])
        assert 'blocks' not in columns
        assert 'p_hat' in columns

    def test_lines(self, sink):
        lines = sink.call_args_list[1][0][0].split()
        assert lines
        assert all(set(line) == {'-'} for line in lines)

    def test_rows_start_with_budget(self, sink):
        assert sink.call_args_list[2][0][0].split()[0] == '4'
        assert sink.call_args_list[3][0][0].split()[0] == '8'

    def test_verbose_zero_prints_nothing(self, sim_cls, bai, gaussian_pair):
        sink = Mock()
        sim = sim_cls(Uniform(), bai, gaussian_pair, n_reps=100, verbose=0,
                      callbacks__print_log__sink=sink)
        sim.rate_curve([4, 8])
        assert sink.call_count == 0

    def test_keys_ignored(self, sim_cls, bai, gaussian_pair):
        sink = Mock()
        sim = sim_cls(Uniform(), bai, gaussian_pair, n_reps=100,
                      callbacks__print_log__sink=sink,
                      callbacks__print_log__keys_ignored='dur')
        sim.estimate(4)
        columns = sink.call_args_list[0][0][0].split()
        assert 'dur' not in columns
        assert columns[0] == 'T'

    def test_reinitialize_prints_header_again(self, sim_cls, bai,
                                              gaussian_pair):
        sink = Mock()
        sim = sim_cls(Uniform(), bai, gaussian_pair, n_reps=100,
                      callbacks__print_log__sink=sink)
        sim.estimate(4)
        sim.initialize()
        sim.estimate(4)
        # twice header + lines + row
        assert sink.call_count == 6

    @pytest.mark.parametrize('value, expected', [
        (None, ''),
        (True, '+'),
        (False, ''),
        (100, '100'),
        (2.0, '2.0'),
        (0.123456, '0.1235'),
        ('abc', 'abc'),
    ])
    def test_format_value(self, print_log_cls, value, expected):
        print_log = print_log_cls().initialize()
        assert print_log.format_value(value) == expected

    def test_sorted_keys(self, print_log_cls):
        print_log = print_log_cls(keys_ignored=['errors']).initialize()
        keys = ['dur', 'p_hat', 'errors', 'T', 'blocks', 'H']
        assert print_log._sorted_keys(keys) == ['T', 'H', 'p_hat', 'dur']


class TestProgressBar:
    @pytest.fixture
    def sim_cls(self):
        from budgetid.simulator import Simulator
        return Simulator

    @pytest.fixture
    def progressbar_cls(self):
        from budgetid.callbacks import ProgressBar
        return ProgressBar

    @patch('budgetid.callbacks.logging.tqdm.tqdm')
    def test_bar_per_point(self, tqdm_mock, sim_cls, progressbar_cls, bai,
                           gaussian_pair):
        sim = sim_cls(Uniform(), bai, gaussian_pair, n_reps=250,
                      block_size=100, callbacks=[progressbar_cls()],
                      verbose=0)
        sim.rate_curve([4, 8])

        assert tqdm_mock.call_count == 2
        assert tqdm_mock.call_args_list[0][1]['total'] == 3
        bar = tqdm_mock.return_value
        assert bar.update.call_count == 6
        assert bar.close.call_count == 2
        postfix = bar.set_postfix.call_args_list[-1][0][0]
        assert set(postfix) == {'errors'}

    @patch('budgetid.callbacks.logging.tqdm.tqdm')
    def test_missing_postfix_keys_are_skipped(
            self, tqdm_mock, sim_cls, progressbar_cls, bai, gaussian_pair):
        sim = sim_cls(Uniform(), bai, gaussian_pair, n_reps=100,
                      callbacks=[progressbar_cls(['errors', 'missing'])],
                      verbose=0)
        sim.estimate(4)
        postfix = tqdm_mock.return_value.set_postfix.call_args_list[-1][0][0]
        assert set(postfix) == {'errors'}

    def test_pickle_drops_bar(self, progressbar_cls):
        import pickle

        progress_bar = progressbar_cls()
        progress_bar.pbar_ = object()
        loaded = pickle.loads(pickle.dumps(progress_bar))
        assert not hasattr(loaded, 'pbar_')


class TestPointTimer:
    def test_records_duration(self, bai, gaussian_pair):
        from budgetid.simulator import Simulator

        sim = Simulator(Uniform(), bai, gaussian_pair, n_reps=100, verbose=0)
        sim.rate_curve([4, 8])
        durations = sim.history_[:, 'dur']
        assert len(durations) == 2
        assert all(isinstance(dur, float) and dur >= 0 for dur in durations)
