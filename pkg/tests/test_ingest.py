import gzip
import io

import pytest

from flowsift import ConfigError, Label, parse_port, read_flows
from flowsift.ingest import (
    DROP_BAD_NUMERIC,
    DROP_NEGATIVE,
    DROP_ROW_TOO_SHORT,
    DROP_SRC_EXCEEDS_TOTAL,
    DROP_ZERO_PKTS_NONZERO_BYTES,
    parse_start_time,
)

from conftest import BOTNET_ROW, GOOD_ROW, ICMP_ROW, make_binetflow


def _write(tmp_path, text, name="flows.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestHappyPath:
    def test_fields_parsed(self, tmp_path):
        path = _write(tmp_path, make_binetflow([GOOD_ROW, BOTNET_ROW, ICMP_ROW]))
        reader = read_flows(path)
        records = list(reader)
        assert len(records) == 3
        flow, label = records[0]
        assert flow.protocol == "udp"
        assert flow.src_addr == "212.50.71.179"
        assert flow.src_port == 39678
        assert flow.dst_port == 13363
        assert flow.tot_pkts == 2
        assert flow.tot_bytes == 135
        assert flow.src_bytes == 75
        assert flow.duration == 3.126
        assert label is Label.BENIGN
        assert records[1][1] is Label.BOTNET
        icmp, _ = records[2]
        assert icmp.src_port == 771  # 0x0303
        assert reader.stats.rows_read == 3
        assert reader.stats.rows_kept == 3
        assert reader.stats.rows_dropped == 0

    def test_empty_file_with_header(self, tmp_path):
        path = _write(tmp_path, make_binetflow([]))
        reader = read_flows(path)
        assert list(reader) == []
        assert reader.stats.rows_read == 0

    def test_gzip_transparent(self, tmp_path):
        path = tmp_path / "flows.csv.gz"
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            fh.write(make_binetflow([GOOD_ROW]))
        records = list(read_flows(path))
        assert len(records) == 1
        assert records[0][0].tot_bytes == 135

    def test_binary_stream_input(self, tmp_path):
        blob = make_binetflow([GOOD_ROW]).encode("utf-8")
        records = list(read_flows(io.BytesIO(blob)))
        assert len(records) == 1

    def test_deterministic_restream(self, tmp_path):
        path = _write(tmp_path, make_binetflow([GOOD_ROW, BOTNET_ROW]))
        reader = read_flows(path)
        first = list(reader)
        stats1 = reader.stats.as_dict()
        second = list(reader)
        assert first == second
        assert reader.stats.as_dict() == stats1

    def test_with_rows_echoes_raw(self, tmp_path):
        path = _write(tmp_path, make_binetflow([GOOD_ROW]))
        ((flow, label, row),) = list(read_flows(path, with_rows=True))
        assert row[2] == "udp"
        assert row[-1] == "flow=Background-UDP-Established"


class TestMalformedRows:
    def drop_reason(self, tmp_path, row):
        path = _write(tmp_path, make_binetflow([GOOD_ROW, row]))
        reader = read_flows(path)
        records = list(reader)
        assert len(records) == 1
        assert reader.stats.rows_dropped == 1
        (reason, count), = reader.stats.drop_reasons.items()
        assert count == 1
        return reason

    def test_non_numeric_bytes(self, tmp_path):
        row = GOOD_ROW.replace(",135,", ",abc,")
        assert self.drop_reason(tmp_path, row) == DROP_BAD_NUMERIC

    def test_negative_duration(self, tmp_path):
        row = GOOD_ROW.replace(",3.126,", ",-1.5,")
        assert self.drop_reason(tmp_path, row) == DROP_NEGATIVE

    def test_src_bytes_exceed_total(self, tmp_path):
        row = GOOD_ROW.replace(",135,75,", ",135,200,")
        assert self.drop_reason(tmp_path, row) == DROP_SRC_EXCEEDS_TOTAL

    def test_zero_pkts_nonzero_bytes(self, tmp_path):
        row = GOOD_ROW.replace(",2,135,75,", ",0,135,75,")
        assert self.drop_reason(tmp_path, row) == DROP_ZERO_PKTS_NONZERO_BYTES

    def test_short_row(self, tmp_path):
        assert self.drop_reason(tmp_path, "2011/08/10,1.0,udp") == DROP_ROW_TOO_SHORT

    def test_accounting_invariant(self, tmp_path):
        rows = [GOOD_ROW, "x,y", GOOD_ROW.replace(",135,", ",nan,"), BOTNET_ROW]
        path = _write(tmp_path, make_binetflow(rows))
        reader = read_flows(path)
        kept = len(list(reader))
        s = reader.stats
        assert s.rows_read == s.rows_kept + s.rows_dropped
        assert s.rows_kept == kept == 2
        assert sum(s.drop_reasons.values()) == s.rows_dropped

    def test_drops_never_fatal(self, tmp_path):
        rows = [GOOD_ROW.replace(",2,", ",?,")] * 5
        path = _write(tmp_path, make_binetflow(rows))
        reader = read_flows(path)
        assert list(reader) == []
        assert reader.stats.rows_dropped == 5


class TestHeaderHandling:
    def test_missing_column_is_config_error(self, tmp_path):
        text = make_binetflow([GOOD_ROW]).replace("TotBytes", "Bytes")
        path = _write(tmp_path, text)
        with pytest.raises(ConfigError, match="TotBytes"):
            list(read_flows(path))

    def test_entirely_empty_file(self, tmp_path):
        path = _write(tmp_path, "")
        with pytest.raises(ConfigError):
            list(read_flows(path))

    def test_custom_column_mapping(self, tmp_path):
        text = make_binetflow([GOOD_ROW]).replace("TotBytes", "OctetCount")
        path = _write(tmp_path, text)
        records = list(read_flows(path, columns={"tot_bytes": "OctetCount"}))
        assert records[0][0].tot_bytes == 135

    def test_unknown_logical_field_rejected(self, tmp_path):
        path = _write(tmp_path, make_binetflow([GOOD_ROW]))
        with pytest.raises(ConfigError):
            read_flows(path, columns={"nonsense": "X"})

    def test_label_optional_for_scoring(self, tmp_path):
        header_no_label = make_binetflow([]).replace(",Label", "")
        row_no_label = GOOD_ROW.rsplit(",", 1)[0]
        path = _write(tmp_path, header_no_label + row_no_label + "\n")
        with pytest.raises(ConfigError):
            list(read_flows(path))
        records = list(read_flows(path, require_label=False))
        assert records[0][0].label_raw == ""
        assert records[0][1] is Label.BENIGN


class TestPortParsing:
    @pytest.mark.parametrize(
        "token,expected",
        [
            ("443", 443),
            ("0x0303", 771),
            ("0X00FF", 255),
            ("", None),
            ("  ", None),
            ("nonsense", None),
            ("70000", None),
            ("-1", None),
            ("65535", 65535),
            ("0", 0),
        ],
    )
    def test_cases(self, token, expected):
        assert parse_port(token) == expected


class TestStartTime:
    def test_binetflow_format(self):
        assert parse_start_time("1970/01/01 00:00:01.500000") == 1.5

    def test_plain_float(self):
        assert parse_start_time("123.25") == 123.25

    def test_unparseable_is_zero_not_fatal(self):
        assert parse_start_time("last tuesday") == 0.0
