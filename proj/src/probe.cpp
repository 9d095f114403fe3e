#include "krossfuse/probe.hpp"

#include <algorithm>
#include <cmath>

#include "krossfuse/exact_fusion.hpp"

namespace krossfuse {

void LabeledEmbeddings::validate() const {
    if (embeddings.empty()) throw InvalidArgument("LabeledEmbeddings: no embeddings");
    const auto n = embeddings.front().rows();
    for (const auto& e : embeddings) {
        if (e.rows() != n) throw InvalidArgument("LabeledEmbeddings: embeddings disagree on row count");
    }
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw InvalidArgument("LabeledEmbeddings: label count does not match rows");
    }
    for (int y : labels) {
        if (y < 0) throw InvalidArgument("LabeledEmbeddings: negative label");
    }
}

int LabeledEmbeddings::num_classes() const {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

Matrix LabeledEmbeddings::features() const {
    validate();
    Eigen::Index cols = 0;
    for (const auto& e : embeddings) cols += e.cols();
    Matrix out(embeddings.front().rows(), cols);
    Eigen::Index at = 0;
    for (const auto& e : embeddings) {
        out.middleCols(at, e.cols()) = e.data();
        at += e.cols();
    }
    return out;
}

double ridge_probe(const LabeledEmbeddings& train, const LabeledEmbeddings& test, double lambda) {
    return ridge_probe(train.features(), train.labels, test.features(), test.labels, lambda);
}

double ridge_probe(const Matrix& train_x, std::span<const int> train_y, const Matrix& test_x,
                   std::span<const int> test_y, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("ridge_probe: lambda must be > 0");
    if (train_x.cols() != test_x.cols()) throw InvalidArgument("ridge_probe: feature dimension mismatch");
    if (static_cast<Eigen::Index>(train_y.size()) != train_x.rows() ||
        static_cast<Eigen::Index>(test_y.size()) != test_x.rows()) {
        throw InvalidArgument("ridge_probe: label count does not match rows");
    }
    if (train_x.rows() == 0 || test_x.rows() == 0) throw InvalidArgument("ridge_probe: empty split");

    int k = 0;
    for (int y : train_y) {
        if (y < 0) throw InvalidArgument("ridge_probe: negative label");
        k = std::max(k, y + 1);
    }
    for (int y : test_y) k = std::max(k, y + 1);

    const Eigen::Index n = train_x.rows();
    const Eigen::RowVectorXd mean = train_x.colwise().mean();
    const Eigen::MatrixXd xc = train_x.rowwise() - mean;

    // Targets: +1 for the class, -1 otherwise. Classes absent from training
    // get an all -1 column, so they are never predicted.
    Eigen::MatrixXd y = Eigen::MatrixXd::Constant(n, k, -1.0);
    for (Eigen::Index i = 0; i < n; ++i) y(i, train_y[i]) = 1.0;
    const Eigen::RowVectorXd y_mean = y.colwise().mean();
    const Eigen::MatrixXd yc = y.rowwise() - y_mean;

    Eigen::MatrixXd w;
    const Eigen::Index d = train_x.cols();
    if (d <= n) {
        Eigen::MatrixXd a = xc.transpose() * xc;
        a.diagonal().array() += lambda;
        w = a.ldlt().solve(xc.transpose() * yc);
    } else {
        // Dual form: W = X^T (X X^T + lambda I)^{-1} Y, cheaper when d > n.
        Eigen::MatrixXd a = xc * xc.transpose();
        a.diagonal().array() += lambda;
        w = xc.transpose() * a.ldlt().solve(yc);
    }

    const Eigen::MatrixXd scores = ((test_x.rowwise() - mean) * w).rowwise() + y_mean;
    long correct = 0;
    for (Eigen::Index i = 0; i < test_x.rows(); ++i) {
        Eigen::Index pred = 0;
        scores.row(i).maxCoeff(&pred);
        if (pred == test_y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_x.rows());
}

std::vector<double> default_C_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

CSelection select_C(const Matrix& psi_feats, const Matrix& gamma_feats, std::span<const int> labels,
                    std::span<const double> grid, int folds, double lambda) {
    const Eigen::Index n = psi_feats.rows();
    if (gamma_feats.rows() != n || static_cast<Eigen::Index>(labels.size()) != n) {
        throw InvalidArgument("select_C: inputs are not row-aligned");
    }
    if (grid.empty()) throw InvalidArgument("select_C: empty grid");
    if (folds < 2 || folds > n) throw InvalidArgument("select_C: need 2 <= folds <= n");

    CSelection sel;
    sel.grid.assign(grid.begin(), grid.end());
    double best = -1.0;
    for (double C : grid) {
        const Matrix fused = krossfuse_shared_batch(psi_feats, gamma_feats, C);
        long correct = 0;
        for (int f = 0; f < folds; ++f) {
            // Fold membership by row index modulo folds.
            std::vector<Eigen::Index> tr, te;
            for (Eigen::Index i = 0; i < n; ++i) (i % folds == f ? te : tr).push_back(i);
            Matrix xtr(static_cast<Eigen::Index>(tr.size()), fused.cols());
            Matrix xte(static_cast<Eigen::Index>(te.size()), fused.cols());
            std::vector<int> ytr, yte;
            for (std::size_t i = 0; i < tr.size(); ++i) {
                xtr.row(static_cast<Eigen::Index>(i)) = fused.row(tr[i]);
                ytr.push_back(labels[tr[i]]);
            }
            for (std::size_t i = 0; i < te.size(); ++i) {
                xte.row(static_cast<Eigen::Index>(i)) = fused.row(te[i]);
                yte.push_back(labels[te[i]]);
            }
            const double acc = ridge_probe(xtr, ytr, xte, yte, lambda);
            correct += std::lround(acc * static_cast<double>(te.size()));
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(n);
        sel.cv_accuracy.push_back(acc);
        if (acc > best) {
            best = acc;
            sel.best_C = C;
        }
    }
    return sel;
}

}  // namespace krossfuse
