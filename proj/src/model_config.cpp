#include "gcnl/model_config.hpp"

#include "gcnl/errors.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace gcnl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> tokenize(std::string_view line)
{
    std::vector<std::string> tokens;
    std::istringstream is{std::string(line)};
    std::string tok;
    while (is >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

std::uint64_t parse_unsigned(const std::string& text, std::size_t line_no)
{
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("model config line " + std::to_string(line_no) + ": '" + text +
                          "' is not a non-negative integer");
    }
    return value;
}

// Parses key=value tokens, requiring exactly the listed keys.
class Fields {
public:
    Fields(const std::vector<std::string>& tokens, std::size_t line_no) : line_(line_no)
    {
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            const auto eq = tokens[i].find('=');
            if (eq == std::string::npos) {
                throw ConfigError("model config line " + std::to_string(line_no) + ": expected key=value, got '" +
                                  tokens[i] + "'");
            }
            const auto key = tokens[i].substr(0, eq);
            if (!values_.emplace(key, tokens[i].substr(eq + 1)).second) {
                throw ConfigError("model config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
            }
        }
    }

    std::size_t number(const std::string& key)
    {
        return static_cast<std::size_t>(parse_unsigned(text(key), line_));
    }

    std::string text(const std::string& key)
    {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            throw ConfigError("model config line " + std::to_string(line_) + ": missing key '" + key + "'");
        }
        auto value = it->second;
        values_.erase(it);
        return value;
    }

    void finish() const
    {
        if (!values_.empty()) {
            throw ConfigError("model config line " + std::to_string(line_) + ": unknown key '" +
                              values_.begin()->first + "'");
        }
    }

private:
    std::size_t line_;
    std::map<std::string, std::string> values_;
};

LayerSpec parse_layer(const std::vector<std::string>& tokens, std::size_t line_no)
{
    const std::string& kind = tokens[0];
    Fields f(tokens, line_no);
    LayerSpec spec;
    if (kind == "conv") {
        layer::Conv c;
        c.in = f.number("in");
        c.out = f.number("out");
        c.kernel = f.number("kernel");
        c.stride = f.number("stride");
        c.padding = f.number("padding");
        spec = c;
    } else if (kind == "relu") {
        spec = layer::Relu{};
    } else if (kind == "pool") {
        layer::Pool p;
        const auto k = f.text("kind");
        if (k == "max") {
            p.spec.kind = PoolKind::max;
        } else if (k == "average") {
            p.spec.kind = PoolKind::average;
        } else {
            throw ConfigError("model config line " + std::to_string(line_no) + ": unknown pool kind '" + k + "'");
        }
        p.spec.window = f.number("window");
        p.spec.stride = f.number("stride");
        spec = p;
    } else if (kind == "flatten") {
        spec = layer::Flatten{};
    } else if (kind == "dense") {
        layer::Dense d;
        d.in = f.number("in");
        d.out = f.number("out");
        spec = d;
    } else if (kind == "softmax") {
        spec = layer::Softmax{};
    } else if (kind == "residual") {
        layer::Residual r;
        r.channels = f.number("channels");
        r.kernel = f.number("kernel");
        spec = r;
    } else if (kind == "dense_block") {
        layer::DenseBlock d;
        d.in = f.number("in");
        d.depth = f.number("depth");
        d.growth = f.number("growth");
        d.kernel = f.number("kernel");
        spec = d;
    } else {
        throw ConfigError("model config line " + std::to_string(line_no) + ": unknown layer kind '" + kind + "'");
    }
    f.finish();
    return spec;
}

} // namespace

std::string_view kind_name(const LayerSpec& spec)
{
    return std::visit(overloaded{
                          [](const layer::Conv&) { return std::string_view("conv"); },
                          [](const layer::Relu&) { return std::string_view("relu"); },
                          [](const layer::Pool&) { return std::string_view("pool"); },
                          [](const layer::Flatten&) { return std::string_view("flatten"); },
                          [](const layer::Dense&) { return std::string_view("dense"); },
                          [](const layer::Softmax&) { return std::string_view("softmax"); },
                          [](const layer::Residual&) { return std::string_view("residual"); },
                          [](const layer::DenseBlock&) { return std::string_view("dense_block"); },
                      },
                      spec);
}

std::string to_text(const ModelConfig& config)
{
    std::ostringstream os;
    os << "input " << config.input.channels << ' ' << config.input.height << ' ' << config.input.width << '\n';
    os << "classes " << config.classes << '\n';
    os << "seed " << config.seed << '\n';
    for (const auto& spec : config.layers) {
        std::visit(overloaded{
                       [&](const layer::Conv& c) {
                           os << "conv in=" << c.in << " out=" << c.out << " kernel=" << c.kernel
                              << " stride=" << c.stride << " padding=" << c.padding;
                       },
                       [&](const layer::Relu&) { os << "relu"; },
                       [&](const layer::Pool& p) {
                           os << "pool kind=" << (p.spec.kind == PoolKind::max ? "max" : "average")
                              << " window=" << p.spec.window << " stride=" << p.spec.stride;
                       },
                       [&](const layer::Flatten&) { os << "flatten"; },
                       [&](const layer::Dense& d) { os << "dense in=" << d.in << " out=" << d.out; },
                       [&](const layer::Softmax&) { os << "softmax"; },
                       [&](const layer::Residual& r) {
                           os << "residual channels=" << r.channels << " kernel=" << r.kernel;
                       },
                       [&](const layer::DenseBlock& d) {
                           os << "dense_block in=" << d.in << " depth=" << d.depth << " growth=" << d.growth
                              << " kernel=" << d.kernel;
                       },
                   },
                   spec);
        os << '\n';
    }
    return os.str();
}

ModelConfig parse_model_config(std::string_view text)
{
    ModelConfig config;
    bool have_input = false;
    bool have_classes = false;
    bool have_seed = false;
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto tokens = tokenize(line);
        if (tokens.empty()) {
            continue;
        }
        const auto& head = tokens[0];
        if (head == "input") {
            if (tokens.size() != 4) {
                throw ConfigError("model config line " + std::to_string(line_no) + ": input needs C H W");
            }
            config.input = {static_cast<std::size_t>(parse_unsigned(tokens[1], line_no)),
                            static_cast<std::size_t>(parse_unsigned(tokens[2], line_no)),
                            static_cast<std::size_t>(parse_unsigned(tokens[3], line_no))};
            have_input = true;
        } else if (head == "classes" || head == "seed") {
            if (tokens.size() != 2) {
                throw ConfigError("model config line " + std::to_string(line_no) + ": " + head + " needs one value");
            }
            const auto v = parse_unsigned(tokens[1], line_no);
            if (head == "classes") {
                config.classes = static_cast<std::size_t>(v);
                have_classes = true;
            } else {
                config.seed = v;
                have_seed = true;
            }
        } else {
            config.layers.push_back(parse_layer(tokens, line_no));
        }
    }
    if (!have_input || !have_classes || !have_seed) {
        throw ConfigError("model config must declare input, classes and seed");
    }
    return config;
}

} // namespace gcnl
