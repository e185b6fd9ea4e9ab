#include "coexist/sac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace coexist::agent {

namespace {

Matrix normal_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
  Matrix m(top.rows() + bottom.rows(), top.cols());
  m.topRows(top.rows()) = top;
  m.bottomRows(bottom.rows()) = bottom;
  return m;
}

void write_vector(std::ostream& out, const Vector& v) {
  out << v.size();
  for (int i = 0; i < v.size(); ++i) out << ' ' << std::hexfloat << v[i] << std::defaultfloat;
  out << '\n';
}

Vector read_vector(std::istream& in) {
  long n = 0;
  in >> n;
  Vector v(n);
  for (long i = 0; i < n; ++i) {
    std::string tok;
    in >> tok;
    v[i] = std::strtod(tok.c_str(), nullptr);
  }
  if (!in) throw std::runtime_error("checkpoint truncated");
  return v;
}

}  // namespace

double log_one_minus_tanh2(double u) {
  // log(1 - tanh^2 u) = 2 (log 2 - u - softplus(-2u))
  const double x = -2.0 * u;
  const double softplus = x > 30.0 ? x : std::log1p(std::exp(x));
  return 2.0 * (std::numbers::ln2 - u - softplus);
}

Batch make_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices,
                 const std::vector<double>& weights) {
  const auto& first = buffer.at(indices.front());
  const int bsz = static_cast<int>(indices.size());
  Batch b;
  b.s.resize(first.s.size(), bsz);
  b.a.resize(first.a.size(), bsz);
  b.s_next.resize(first.s.size(), bsz);
  b.r.resize(bsz);
  b.not_done.resize(bsz);
  b.weights.resize(bsz);
  for (int j = 0; j < bsz; ++j) {
    const Transition& t = buffer.at(indices[static_cast<std::size_t>(j)]);
    b.s.col(j) = t.s;
    b.a.col(j) = t.a;
    b.s_next.col(j) = t.s_next;
    b.r[j] = t.r;
    b.not_done[j] = t.not_done;
    b.weights[j] = weights[static_cast<std::size_t>(j)];
  }
  return b;
}

PolicyEval evaluate_policy(const nn::Mlp& actor, const Matrix& states, const Matrix& chi) {
  PolicyEval e;
  const Matrix out = actor.forward(states, e.cache);
  const int n = static_cast<int>(out.rows() / 2);
  e.mean = out.topRows(n);
  e.raw_log_std = out.bottomRows(n);
  e.log_std = e.raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  e.u = e.mean + e.log_std.array().exp().matrix().cwiseProduct(chi);
  e.action = e.u.array().tanh().matrix();
  e.log_prob = Vector::Zero(out.cols());
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  for (int j = 0; j < out.cols(); ++j) {
    double lp = 0.0;
    for (int i = 0; i < n; ++i) {
      lp += -0.5 * chi(i, j) * chi(i, j) - e.log_std(i, j) - half_log_2pi -
            log_one_minus_tanh2(e.u(i, j));
    }
    e.log_prob[j] = lp;
  }
  return e;
}

Sac::Sac(int state_dim, int action_dim, const scenario::AgentHyperparams& hp, std::uint64_t seed)
    : state_dim_(state_dim), action_dim_(action_dim), hp_(hp) {
  Rng rng = make_stream(seed, streams::kAgentInit);
  actor_ = nn::Mlp(state_dim, hp.hidden, 2 * action_dim, rng);
  target_actor_ = actor_;
  for (int i = 0; i < 2; ++i) {
    critic_[i] = nn::Mlp(state_dim + action_dim, hp.hidden, 1, rng);
    target_critic_[i] = critic_[i];
    critic_opt_[i] = nn::Adam(critic_[i].num_parameters(), hp.learning_rate);
  }
  actor_opt_ = nn::Adam(actor_.num_parameters(), hp.learning_rate);
  temp_opt_ = nn::Adam(1, hp.learning_rate);
  log_temp_ = std::log(hp.temperature);
  target_entropy_ = -static_cast<double>(action_dim);
}

double Sac::temperature() const { return std::exp(log_temp_); }
void Sac::set_temperature(double psi) { log_temp_ = std::log(psi); }

Vector Sac::act_with_noise(const Vector& state, const Vector& chi) const {
  PolicyEval e = evaluate_policy(actor_, state, chi);
  return e.action.col(0);
}

double Sac::log_prob(const Vector& state, const Vector& chi) const {
  return evaluate_policy(actor_, state, chi).log_prob[0];
}

Vector Sac::act(const Vector& state, bool deterministic, Rng& rng) const {
  if (deterministic) {
    const Matrix out = actor_.forward(state);
    return out.topRows(action_dim_).col(0).array().tanh().matrix();
  }
  return act_with_noise(state, normal_matrix(action_dim_, 1, rng).col(0));
}

Vector Sac::critic_target(const Batch& b, const Matrix& chi_next) const {
  PolicyEval e = evaluate_policy(target_actor_, b.s_next, chi_next);
  const Matrix in = stack(b.s_next, e.action);
  const Matrix q1 = target_critic_[0].forward(in);
  const Matrix q2 = target_critic_[1].forward(in);
  Vector y(b.r.size());
  const double psi = temperature();
  for (int j = 0; j < y.size(); ++j) {
    const double qmin = std::min(q1(0, j), q2(0, j));
    y[j] = b.r[j] + b.not_done[j] * hp_.discount * (qmin - psi * e.log_prob[j]);
  }
  return y;
}

double Sac::critic_loss(int which, const Batch& b, const Vector& y, std::vector<nn::Layer>* grads,
                        Vector* td) const {
  const nn::Mlp& net = critic_[which];
  nn::Mlp::Cache cache;
  const Matrix q = net.forward(stack(b.s, b.a), cache);
  const int bsz = static_cast<int>(y.size());
  Matrix g(1, bsz);
  double loss = 0.0;
  if (td) td->resize(bsz);
  for (int j = 0; j < bsz; ++j) {
    const double delta = q(0, j) - y[j];
    loss += b.weights[j] * delta * delta;
    g(0, j) = 2.0 * b.weights[j] * delta / bsz;
    if (td) (*td)[j] = delta;
  }
  if (grads) net.backward(cache, g, grads);
  return loss / bsz;
}

double Sac::actor_loss(const Matrix& states, const Matrix& chi, std::vector<nn::Layer>* grads,
                       Vector* log_probs) const {
  PolicyEval e = evaluate_policy(actor_, states, chi);
  const int bsz = static_cast<int>(states.cols());
  const int n = action_dim_;
  const Matrix in = stack(states, e.action);
  nn::Mlp::Cache c1;
  nn::Mlp::Cache c2;
  const Matrix q1 = critic_[0].forward(in, c1);
  const Matrix q2 = critic_[1].forward(in, c2);
  const double psi = temperature();

  Matrix g1 = Matrix::Zero(1, bsz);
  Matrix g2 = Matrix::Zero(1, bsz);
  double loss = 0.0;
  for (int j = 0; j < bsz; ++j) {
    const bool first = q1(0, j) <= q2(0, j);
    const double qmin = first ? q1(0, j) : q2(0, j);
    loss += psi * e.log_prob[j] - qmin;
    (first ? g1 : g2)(0, j) = -1.0 / bsz;
  }
  if (log_probs) *log_probs = e.log_prob;
  if (!grads) return loss / bsz;

  const Matrix dx1 = critic_[0].backward(c1, g1, nullptr);
  const Matrix dx2 = critic_[1].backward(c2, g2, nullptr);
  const Matrix d_action = dx1.bottomRows(n) + dx2.bottomRows(n);

  const Matrix sigma = e.log_std.array().exp().matrix();
  Matrix d_out(2 * n, bsz);
  const double w = psi / bsz;
  for (int j = 0; j < bsz; ++j) {
    for (int i = 0; i < n; ++i) {
      const double a = e.action(i, j);
      const double du = d_action(i, j) * (1.0 - a * a) + w * 2.0 * a;
      d_out(i, j) = du;
      const double raw = e.raw_log_std(i, j);
      const bool active = raw > kLogStdMin && raw < kLogStdMax;
      d_out(n + i, j) = active ? du * sigma(i, j) * chi(i, j) - w : 0.0;
    }
  }
  actor_.backward(e.cache, d_out, grads);
  return loss / bsz;
}

TrainReport Sac::train_step(ReplayBuffer& buffer, Rng& rng) {
  TrainReport rep;
  rep.temperature = temperature();
  const std::size_t need = static_cast<std::size_t>(std::max(hp_.min_buffer, 1));
  if (buffer.size() < need) return rep;

  const auto bsz = static_cast<std::size_t>(hp_.minibatch);
  ReplayBuffer::Sample smp = buffer.sample(bsz, rng);
  const Batch b = make_batch(buffer, smp.indices, smp.weights);
  const Vector y = critic_target(b, normal_matrix(action_dim_, static_cast<int>(bsz), rng));

  Vector td_sum = Vector::Zero(static_cast<int>(bsz));
  for (int i = 0; i < 2; ++i) {
    std::vector<nn::Layer> grads = critic_[i].zero_grads();
    Vector td;
    rep.critic_loss += 0.5 * critic_loss(i, b, y, &grads, &td);
    td_sum += td.cwiseAbs();
    Vector g = nn::flatten(grads);
    nn::clip_norm(g, hp_.grad_clip);
    Vector p = critic_[i].flat();
    critic_opt_[i].step(p, g);
    critic_[i].set_flat(p);
  }

  std::vector<nn::Layer> agrads = actor_.zero_grads();
  Vector log_probs;
  rep.actor_loss = actor_loss(b.s, normal_matrix(action_dim_, static_cast<int>(bsz), rng), &agrads,
                              &log_probs);
  Vector g = nn::flatten(agrads);
  nn::clip_norm(g, hp_.grad_clip);
  Vector p = actor_.flat();
  actor_opt_.step(p, g);
  actor_.set_flat(p);
  rep.entropy = -log_probs.mean();

  if (hp_.temperature_mode == scenario::TemperatureMode::Auto) {
    Vector lt(1);
    lt[0] = log_temp_;
    Vector gt(1);
    gt[0] = -(log_probs.array() + target_entropy_).mean();
    temp_opt_.step(lt, gt);
    log_temp_ = lt[0];
  }

  for (int i = 0; i < 2; ++i) target_critic_[i].soft_update(critic_[i], hp_.soft_update);
  target_actor_.soft_update(actor_, hp_.soft_update);

  std::vector<double> td(bsz);
  for (std::size_t j = 0; j < bsz; ++j) td[j] = 0.5 * td_sum[static_cast<int>(j)];
  buffer.update_priorities(smp.indices, td);

  rep.trained = true;
  rep.temperature = temperature();
  return rep;
}

void Sac::save(std::ostream& out) const {
  out << "coexist-sac 1 " << state_dim_ << ' ' << action_dim_ << '\n';
  write_vector(out, actor_.flat());
  write_vector(out, target_actor_.flat());
  for (int i = 0; i < 2; ++i) {
    write_vector(out, critic_[i].flat());
    write_vector(out, target_critic_[i].flat());
  }
  out << std::hexfloat << log_temp_ << std::defaultfloat << '\n';
}

void Sac::load(std::istream& in) {
  std::string magic;
  int version = 0;
  int sd = 0;
  int ad = 0;
  in >> magic >> version >> sd >> ad;
  if (magic != "coexist-sac" || version != 1) throw std::runtime_error("not a SAC checkpoint");
  if (sd != state_dim_ || ad != action_dim_) throw std::runtime_error("checkpoint shape mismatch");
  actor_.set_flat(read_vector(in));
  target_actor_.set_flat(read_vector(in));
  for (int i = 0; i < 2; ++i) {
    critic_[i].set_flat(read_vector(in));
    target_critic_[i].set_flat(read_vector(in));
  }
  std::string tok;
  in >> tok;
  log_temp_ = std::strtod(tok.c_str(), nullptr);
}

}  // namespace coexist::agent
