import json

import pytest
from hypothesis import given, strategies as st

from constraint_mcp import rpc

json_scalar = st.none() | st.booleans() | st.integers(-10**9, 10**9) | st.text(max_size=20) | \
    st.floats(allow_nan=False, allow_infinity=False)
json_value = st.recursive(json_scalar, lambda c: st.lists(c, max_size=4) | st.dictionaries(st.text(max_size=8), c, max_size=4),
                          max_leaves=15)
ids = st.integers(-1000, 10**6) | st.text(max_size=10)


def test_decode_request():
    env = rpc.codec_decode('{"jsonrpc":"2.0","id":1,"method":"tools/list"}')
    assert env.id == 1 and env.method == "tools/list" and env.is_request


def test_decode_parse_error():
    with pytest.raises(rpc.RpcError) as e:
        rpc.codec_decode("{not json")
    assert e.value.code == -32700


@pytest.mark.parametrize("line", ['{"jsonrpc":"2.0","id":2}', '{"id":1,"method":"x"}', '[1,2]',
                                  '{"jsonrpc":"2.0","id":1,"method":"x","result":1}',
                                  '{"jsonrpc":"2.0","id":1,"result":1,"error":{"code":1,"message":"m"}}',
                                  '{"jsonrpc":"2.0","id":[1],"method":"x"}'])
def test_decode_invalid_request(line):
    with pytest.raises(rpc.RpcError) as e:
        rpc.codec_decode(line)
    assert e.value.code == -32600


def test_encode_examples():
    assert rpc.codec_encode(rpc.response(1, {})) == '{"jsonrpc":"2.0","id":1,"result":{}}\n'
    assert '"code":-32601' in rpc.codec_encode(rpc.error_response(3, -32601, "nope"))
    line = rpc.codec_encode(rpc.response(1, "a\nb"))
    assert line.count("\n") == 1 and line.endswith("\n")


def test_encode_rejects_both_result_and_error():
    with pytest.raises(rpc.RpcError):
        rpc.codec_encode(rpc.RpcEnvelope(id=1, result=1, error={"code": 1, "message": "x"}))


def test_notification_has_no_id():
    env = rpc.codec_decode('{"jsonrpc":"2.0","method":"notifications/initialized"}')
    assert env.is_notification and env.id is rpc.ABSENT


envelopes = st.one_of(
    st.builds(rpc.request, ids, st.text(min_size=1, max_size=15),
              st.just(rpc.ABSENT) | st.dictionaries(st.text(max_size=6), json_value, max_size=3)),
    st.builds(rpc.notification, st.text(min_size=1, max_size=15)),
    st.builds(rpc.response, ids, json_value),
    st.builds(rpc.error_response, ids, st.integers(-33000, 1000), st.text(max_size=20)),
)


@given(envelopes)
def test_round_trip(env):
    line = rpc.codec_encode(env)
    assert line.endswith("\n") and "\n" not in line[:-1]
    assert rpc.codec_decode(line) == env
    json.loads(line)
