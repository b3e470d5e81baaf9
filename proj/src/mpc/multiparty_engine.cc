// Copyright 2026 The HyFL-Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <condition_variable>
#include <deque>
#include <exception>
#include <functional>
#include <thread>
#include <utility>

#include "engines.h"
#include "hyfl/common/error.h"

namespace hyfl::mpc {
namespace {

using Message = std::vector<uint64_t>;

// Point-to-point FIFO channels between a fixed list of named endpoints.
// Every send between distinct names is charged to the meter unless the
// network is unmetered (dealer, helper and reporting traffic).
class Network {
 public:
  Network(std::vector<std::string> names, CostMeter* meter)
      : names_(std::move(names)), meter_(meter) {
    const size_t n = names_.size();
    channels_.reserve(n * n);
    for (size_t i = 0; i < n * n; ++i) {
      channels_.push_back(std::make_unique<Channel>());
    }
  }

  void Send(int from, int to, Message msg, bool metered = true) {
    if (metered && meter_ != nullptr && names_[from] != names_[to]) {
      meter_->AddBytes(names_[from], names_[to], msg.size() * 8);
    }
    Channel& ch = channel(from, to);
    {
      std::lock_guard lock(ch.mu);
      ch.queue.push_back(std::move(msg));
    }
    ch.cv.notify_one();
  }

  Message Receive(int from, int to) {
    Channel& ch = channel(from, to);
    std::unique_lock lock(ch.mu);
    ch.cv.wait(lock, [&] { return !ch.queue.empty() || aborted_; });
    if (ch.queue.empty()) throw RuntimeFailure("party network aborted");
    Message msg = std::move(ch.queue.front());
    ch.queue.pop_front();
    return msg;
  }

  void Abort() {
    aborted_ = true;
    for (auto& ch : channels_) {
      std::lock_guard lock(ch->mu);
      ch->cv.notify_all();
    }
  }

  int size() const { return static_cast<int>(names_.size()); }

 private:
  struct Channel {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Message> queue;
  };

  Channel& channel(int from, int to) {
    return *channels_[static_cast<size_t>(from) * names_.size() +
                      static_cast<size_t>(to)];
  }

  std::vector<std::string> names_;
  CostMeter* meter_;
  std::vector<std::unique_ptr<Channel>> channels_;
  std::atomic<bool> aborted_{false};
};

// One thread per endpoint; the first failure aborts the network and is
// rethrown after all parties have stopped.
void RunParties(Network& net, const std::function<void(int)>& party) {
  const int n = net.size();
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    threads.emplace_back([&, i] {
      try {
        party(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
        net.Abort();
      }
    });
  }
  for (auto& t : threads) t.join();
  // Prefer the root cause over the induced "aborted" failures.
  std::exception_ptr first;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const RuntimeFailure&) {
      if (!first) first = e;
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (first) std::rethrow_exception(first);
}

std::vector<std::string> MemberNames(const PartySet& set) {
  std::vector<std::string> names;
  for (int i = 0; i < set.size; ++i) names.push_back(set.member(i));
  return names;
}

// Sends `mine` to every other party and returns the elementwise sum of all
// parties' messages.
Message ExchangeSum(Network& net, int self, int parties, const Message& mine) {
  for (int j = 0; j < parties; ++j) {
    if (j != self) net.Send(self, j, mine);
  }
  Message sum = mine;
  for (int j = 0; j < parties; ++j) {
    if (j == self) continue;
    const Message other = net.Receive(j, self);
    for (size_t k = 0; k < sum.size(); ++k) sum[k] += other[k];
  }
  return sum;
}

ring::FixedVec SumInto(ring::FixedVec acc, const Message& msg) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += msg[i];
  return acc;
}

void CheckPayloads(const ShareSet& lo, std::span<ShareSet* const> lo_payload,
                   std::span<ShareSet* const> hi_payload) {
  HYFL_ENFORCE(lo_payload.size() == hi_payload.size(), ShapeError,
               "payload count differs between slots");
  for (size_t k = 0; k < lo_payload.size(); ++k) {
    for (const ShareSet* p : {lo_payload[k], hi_payload[k]}) {
      HYFL_ENFORCE(p->valid() && p->owner() == lo.owner(), SharingError,
                   "payload not held by the comparing committee");
      HYFL_ENFORCE(p->size() == lo.size(), ShapeError,
                   "payload length differs from value length");
    }
  }
}

}  // namespace

ShareSet MultiPartyEngine::Share(const ring::FixedVec& secret,
                                 std::string_view target, Rng& rng,
                                 std::string_view sender) {
  const PartySet& set = party_set(target);
  std::vector<std::string> names{std::string(sender)};
  for (const auto& m : MemberNames(set)) names.push_back(m);
  Network net(names, &meter_);
  std::vector<ring::FixedVec> out(static_cast<size_t>(set.size));
  RunParties(net, [&](int i) {
    if (i == 0) {
      auto shares = SplitSecret(secret, set.size, rng);
      for (int k = 0; k < set.size; ++k) {
        net.Send(0, k + 1, std::move(shares[k].raw()));
      }
    } else {
      out[i - 1] = ring::FixedVec(net.Receive(0, i), secret.frac_bits());
    }
  });
  meter_.AddRounds(1);
  return ShareSet(set.id, std::move(out));
}

ShareSet MultiPartyEngine::Reshare(ShareSet& shares, std::string_view from,
                                   std::string_view to, Rng& rng) {
  CheckOwner(shares, from);
  const PartySet& src = party_set(from);
  const PartySet& dst = party_set(to);
  std::vector<std::string> names = MemberNames(src);
  for (const auto& m : MemberNames(dst)) names.push_back(m);
  std::vector<uint64_t> seeds;
  for (int i = 0; i < src.size; ++i) seeds.push_back(rng.NextU64());
  const size_t length = shares.size();
  const int f = shares.frac_bits();

  Network net(names, &meter_);
  std::vector<ring::FixedVec> out(static_cast<size_t>(dst.size));
  RunParties(net, [&](int i) {
    if (i < src.size) {
      // Each source member re-shares its own share to the destination.
      Rng local(seeds[i]);
      auto sub = SplitSecret(shares.share(i), dst.size, local);
      for (int j = 0; j < dst.size; ++j) {
        net.Send(i, src.size + j, std::move(sub[j].raw()));
      }
    } else {
      ring::FixedVec acc(length, f);
      for (int k = 0; k < src.size; ++k) acc = SumInto(std::move(acc), net.Receive(k, i));
      out[i - src.size] = std::move(acc);
    }
  });
  meter_.AddRounds(1);
  shares.Invalidate();
  return ShareSet(dst.id, std::move(out));
}

ring::FixedVec MultiPartyEngine::Reveal(const ShareSet& shares,
                                        const Receiver& to) {
  HYFL_ENFORCE(shares.valid(), SharingError, "reveal of invalidated ShareSet");
  LogReveal(shares, to);
  const PartySet& set = party_set(shares.owner());
  std::vector<std::string> names = MemberNames(set);
  int receiver = -1;
  for (int i = 0; i < set.size; ++i) {
    if (names[i] == to.id) receiver = i;
  }
  if (receiver < 0) {
    names.push_back(to.id);
    receiver = set.size;
  }
  Network net(names, to.out_of_band ? nullptr : &meter_);
  ring::FixedVec result(shares.size(), shares.frac_bits());
  RunParties(net, [&](int i) {
    if (i == receiver) {
      ring::FixedVec acc(shares.size(), shares.frac_bits());
      if (i < set.size) acc = shares.share(i);
      for (int k = 0; k < set.size; ++k) {
        if (k != i) acc = SumInto(std::move(acc), net.Receive(k, i));
      }
      result = std::move(acc);
    } else {
      net.Send(i, receiver, shares.share(i).raw());
    }
  });
  if (!to.out_of_band) meter_.AddRounds(1);
  return result;
}

ShareSet MultiPartyEngine::BeaverMul(const ShareSet& a, const ShareSet& b,
                                     MulMode mode) {
  CheckPair(a, b);
  const PartySet& set = party_set(a.owner());
  const size_t length = a.size();
  const int f = a.frac_bits();
  const int n = set.size;
  TripleDealer::Triple triple = dealer_.Next(length, n, f);
  meter_.AddTriples(length);

  Network net(MemberNames(set), &meter_);
  std::vector<ring::FixedVec> out(static_cast<size_t>(n));
  RunParties(net, [&](int i) {
    const auto& x = a.share(i);
    const auto& y = b.share(i);
    const auto& ta = triple.a[i];
    const auto& tb = triple.b[i];
    const auto& tc = triple.c[i];
    // Masked openings d = x - a, e = y - b.
    Message de(2 * length);
    for (size_t k = 0; k < length; ++k) {
      de[k] = x[k] - ta[k];
      de[length + k] = y[k] - tb[k];
    }
    const Message sum = ExchangeSum(net, i, n, de);
    ring::FixedVec z(length, f);
    for (size_t k = 0; k < length; ++k) {
      const uint64_t d = sum[k];
      const uint64_t e = sum[length + k];
      z[k] = tc[k] + d * tb[k] + e * ta[k];
      if (i == 0) z[k] += d * e;
    }
    out[i] = std::move(z);
  });
  meter_.AddRounds(1);
  ShareSet product(set.id, std::move(out));
  return mode == MulMode::kFixed ? Truncate(product) : product;
}

ShareSet MultiPartyEngine::Truncate(const ShareSet& product) {
  const PartySet& set = party_set(product.owner());
  const int n = set.size;
  const int f = product.frac_bits();
  const size_t length = product.size();
  std::vector<ring::FixedVec> out;
  if (n == 2) {
    // Two parties truncate locally.
    for (int p = 0; p < n; ++p) {
      ring::FixedVec s = product.share(p);
      for (auto& v : s.raw()) v = LocalTruncateShare(v, p, f);
      out.push_back(std::move(s));
    }
    return ShareSet(set.id, std::move(out));
  }
  // Larger committees open the product under a dealer mask r and subtract
  // shares of r >> f.
  const TripleDealer::TruncationPair pair = dealer_.NextTruncation(length, n, f);
  out.resize(static_cast<size_t>(n));
  Network net(MemberNames(set), &meter_);
  RunParties(net, [&](int i) {
    const auto& z = product.share(i);
    Message masked(length);
    for (size_t k = 0; k < length; ++k) masked[k] = z[k] + pair.r[i][k];
    const Message c = ExchangeSum(net, i, n, masked);
    ring::FixedVec t(length, f);
    for (size_t k = 0; k < length; ++k) {
      t[k] = (i == 0 ? ring::TruncateRaw(c[k], f) : 0) - pair.r_shifted[i][k];
    }
    out[i] = std::move(t);
  });
  meter_.AddRounds(1);
  return ShareSet(set.id, std::move(out));
}

void MultiPartyEngine::CompareExchange(ShareSet& lo, ShareSet& hi,
                                       std::span<ShareSet* const> lo_payload,
                                       std::span<ShareSet* const> hi_payload,
                                       Rng& rng, CompareKind kind) {
  CheckPair(lo, hi);
  CheckPayloads(lo, lo_payload, hi_payload);
  const PartySet& set = party_set(lo.owner());
  const size_t length = lo.size();
  const int f = lo.frac_bits();
  const int n = set.size;

  // Ideal comparison: a helper receives the operands' shares and returns a
  // fresh sharing of s = [lo > hi]. Its traffic is replaced by the modeled
  // comparison cost.
  std::vector<std::string> names = MemberNames(set);
  names.push_back("compare-helper");
  const int helper = n;
  Rng helper_rng(rng.NextU64());
  Network net(names, &meter_);
  std::vector<ring::FixedVec> bit_shares(static_cast<size_t>(n));
  RunParties(net, [&](int i) {
    if (i == helper) {
      ring::FixedVec x(length, f), y(length, f);
      for (int k = 0; k < n; ++k) {
        Message m = net.Receive(k, helper);
        for (size_t e = 0; e < length; ++e) {
          x[e] += m[e];
          y[e] += m[length + e];
        }
      }
      ring::FixedVec s(length, f);
      for (size_t e = 0; e < length; ++e) {
        s[e] = ring::AsSigned(x[e]) > ring::AsSigned(y[e]) ? 1 : 0;
      }
      auto parts = SplitSecret(s, n, helper_rng);
      for (int k = 0; k < n; ++k) net.Send(helper, k, std::move(parts[k].raw()), false);
    } else {
      Message m(2 * length);
      const auto& x = lo.share(i);
      const auto& y = hi.share(i);
      for (size_t e = 0; e < length; ++e) {
        m[e] = x[e];
        m[length + e] = y[e];
      }
      net.Send(i, helper, std::move(m), false);
      bit_shares[i] = ring::FixedVec(net.Receive(helper, i), f);
    }
  });
  ChargeComparisons(set, length, kind);

  // Multiplexer: t = s * (hi - lo) over the value and every payload, then
  // lo += t, hi -= t.
  const ShareSet s(set.id, std::move(bit_shares));
  std::vector<ShareSet> diffs{Sub(hi, lo)};
  for (size_t k = 0; k < lo_payload.size(); ++k) {
    diffs.push_back(Sub(*hi_payload[k], *lo_payload[k]));
  }
  const ShareSet d = Concat(diffs);
  const std::vector<ShareSet> reps(diffs.size(), s);
  const ShareSet sel = Concat(reps);
  const ShareSet t = BeaverMul(sel, d, MulMode::kInteger);

  std::vector<size_t> idx(length);
  auto block = [&](size_t b) {
    for (size_t e = 0; e < length; ++e) idx[e] = b * length + e;
    return Slice(t, idx);
  };
  {
    const ShareSet tb = block(0);
    lo = Add(lo, tb);
    hi = Sub(hi, tb);
  }
  for (size_t k = 0; k < lo_payload.size(); ++k) {
    const ShareSet tb = block(k + 1);
    *lo_payload[k] = Add(*lo_payload[k], tb);
    *hi_payload[k] = Sub(*hi_payload[k], tb);
  }
}

ShareSet MultiPartyEngine::ScalarMul(ring::FixedScalar c, const ShareSet& a) {
  HYFL_ENFORCE(a.valid(), SharingError, "operation on invalidated ShareSet");
  HYFL_ENFORCE(c.frac_bits == a.frac_bits(), ShapeError,
               "scalar precision differs from shares");
  return Truncate(ScaleInt(ring::AsSigned(c.raw), a));
}

}  // namespace hyfl::mpc
